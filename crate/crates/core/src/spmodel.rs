//! Single-particle model spaces and deformed bases.
//!
//! A [`ModelSpace`] fixes the qubit layout: all proton modes first, then all
//! neutron modes; inside a species the modes are sorted by `j` (ascending,
//! ties in input order) and then by `m` (ascending). Every Jordan-Wigner
//! string in the crate is defined relative to this layout.
//!
//! Angular momenta are stored doubled (`two_j`, `two_m`) so that half-integers
//! stay exact.

use std::fmt;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Proton,
    Neutron,
}

impl Species {
    pub fn name(self) -> &'static str {
        match self {
            Species::Proton => "proton",
            Species::Neutron => "neutron",
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" | "proton" | "protons" => Ok(Species::Proton),
            "n" | "neutron" | "neutrons" => Ok(Species::Neutron),
            other => Err(Error::Parse(format!("unknown species `{other}`"))),
        }
    }
}

/// One single-particle state |j m> of a given species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub species: Species,
    pub two_j: u32,
    pub two_m: i32,
    /// Index of the shell (within the whole space) this mode belongs to.
    pub shell: usize,
    /// Global qubit index.
    pub index: usize,
}

impl Mode {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }
}

/// A `j` shell: `2j+1` consecutive modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shell {
    pub species: Species,
    pub two_j: u32,
    /// Global index of the `m = -j` mode.
    pub offset: usize,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }
}

/// Contiguous qubit range owned by one species.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesBlock {
    pub species: Species,
    pub offset: usize,
    pub len: usize,
    /// Shells of this species, in layout order.
    pub shells: Vec<usize>,
}

impl SpeciesBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// One entry of a model-space description, `j` in units of hbar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub species: Species,
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ShellSpec>", into = "Vec<ShellSpec>")]
pub struct ModelSpace {
    modes: Vec<Mode>,
    shells: Vec<Shell>,
    blocks: Vec<SpeciesBlock>,
}

fn two_j_of(j: f64) -> Result<u32> {
    let two = 2.0 * j;
    if !(j > 0.0) || (two - two.round()).abs() > 1e-9 || (two.round() as i64) % 2 == 0 {
        return Err(Error::InvalidJ(j));
    }
    Ok(two.round() as u32)
}

/// Builds a model space from `(species, j)` shells.
pub fn build_space(spec: &[ShellSpec]) -> Result<ModelSpace> {
    if spec.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut entries = Vec::with_capacity(spec.len());
    for (pos, s) in spec.iter().enumerate() {
        entries.push((s.species, two_j_of(s.j)?, pos));
    }
    // stable: ties in j keep input order
    entries.sort_by_key(|&(sp, two_j, pos)| (sp, two_j, pos));

    let mut modes = Vec::new();
    let mut shells = Vec::new();
    let mut blocks: Vec<SpeciesBlock> = Vec::new();
    for (species, two_j, _) in entries {
        let offset = modes.len();
        let shell = shells.len();
        shells.push(Shell { species, two_j, offset });
        for k in 0..=two_j as i32 {
            modes.push(Mode { species, two_j, two_m: -(two_j as i32) + 2 * k, shell, index: modes.len() });
        }
        match blocks.last_mut() {
            Some(b) if b.species == species => {
                b.len += two_j as usize + 1;
                b.shells.push(shell);
            }
            _ => blocks.push(SpeciesBlock { species, offset, len: two_j as usize + 1, shells: vec![shell] }),
        }
    }
    Ok(ModelSpace { modes, shells, blocks })
}

impl TryFrom<Vec<ShellSpec>> for ModelSpace {
    type Error = Error;

    fn try_from(spec: Vec<ShellSpec>) -> Result<Self> {
        build_space(&spec)
    }
}

impl From<ModelSpace> for Vec<ShellSpec> {
    fn from(space: ModelSpace) -> Self {
        space.shell_specs()
    }
}

impl ModelSpace {
    /// The `1s1/2 0d3/2 0d5/2` space for the given species.
    pub fn sd_shell(species: &[Species]) -> Self {
        let spec: Vec<ShellSpec> = species
            .iter()
            .flat_map(|&s| [0.5, 1.5, 2.5].map(|j| ShellSpec { species: s, j }))
            .collect();
        build_space(&spec).expect("sd shell is valid")
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    pub fn blocks(&self) -> &[SpeciesBlock] {
        &self.blocks
    }

    pub fn block(&self, species: Species) -> Result<&SpeciesBlock> {
        self.blocks
            .iter()
            .find(|b| b.species == species)
            .ok_or_else(|| Error::MissingSpecies(species.to_string()))
    }

    pub fn species(&self) -> Vec<Species> {
        self.blocks.iter().map(|b| b.species).collect()
    }

    /// Index of the block containing global qubit `q`.
    pub fn block_of(&self, q: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.range().contains(&q))
    }

    pub fn shell_specs(&self) -> Vec<ShellSpec> {
        self.shells.iter().map(|s| ShellSpec { species: s.species, j: s.j() }).collect()
    }

    /// Global index of the time-reversed partner `(j, -m)`.
    pub fn partner(&self, q: usize) -> usize {
        let mode = self.modes[q];
        let shell = self.shells[mode.shell];
        let k = q - shell.offset;
        shell.offset + shell.len() - 1 - k
    }

    /// Largest `2j` present in the given species.
    pub fn max_two_j(&self, species: Species) -> Result<u32> {
        let block = self.block(species)?;
        Ok(block.shells.iter().map(|&s| self.shells[s].two_j).max().unwrap_or(1))
    }
}

/// Deformed single-particle basis of one species.
///
/// Column `a` of `matrix` holds deformed mode `a` expanded in the spherical
/// modes of the block, so operators transform as `O~ = U^T O U`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesDeformation<T> {
    pub species: Species,
    pub matrix: Array2<T>,
    pub occupations: Vec<usize>,
}

impl<T: Real> SpeciesDeformation<T> {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |(U^T U - I)_{ab}|`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.matrix)
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n();
        (0..n).all(|a| (0..n).all(|b| {
            let target = if a == b { T::one() } else { T::zero() };
            (self.matrix[[a, b]] - target).abs() <= T::structural()
        }))
    }

    fn validate(&self) -> Result<()> {
        let (rows, cols) = self.matrix.dim();
        if rows != cols {
            return Err(Error::Shape { rows, cols, expected: rows });
        }
        let residual = self.orthogonality_residual();
        if residual > T::STRUCTURAL.max(1e-12) {
            return Err(Error::NotOrthogonal { residual });
        }
        check_occupations(&self.occupations, rows)
    }
}

pub(crate) fn check_occupations(occ: &[usize], modes: usize) -> Result<()> {
    let mut seen = vec![false; modes];
    for &o in occ {
        if o >= modes {
            return Err(Error::OccupationOutOfRange { index: o, modes });
        }
        if std::mem::replace(&mut seen[o], true) {
            return Err(Error::DuplicateOccupation(o));
        }
    }
    Ok(())
}

pub(crate) fn orthogonality_residual<T: Real>(u: &Array2<T>) -> f64 {
    let utu = u.t().dot(u);
    let mut worst = 0.0f64;
    for ((a, b), &v) in utu.indexed_iter() {
        let target = if a == b { 1.0 } else { 0.0 };
        worst = worst.max((v.f64() - target).abs());
    }
    worst
}

/// Deformed bases for every species of a space, in layout order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformedBasis<T> {
    pub blocks: Vec<SpeciesDeformation<T>>,
}

impl<T: Real> DeformedBasis<T> {
    pub fn identity(space: &ModelSpace) -> Self {
        let blocks = space
            .blocks()
            .iter()
            .map(|b| SpeciesDeformation { species: b.species, matrix: Array2::eye(b.len), occupations: Vec::new() })
            .collect();
        DeformedBasis { blocks }
    }

    pub fn species(&self, species: Species) -> Result<&SpeciesDeformation<T>> {
        self.blocks
            .iter()
            .find(|b| b.species == species)
            .ok_or_else(|| Error::MissingSpecies(species.to_string()))
    }

    pub fn occupy(&mut self, species: Species, occupations: &[usize]) -> Result<()> {
        let block = self
            .blocks
            .iter_mut()
            .find(|b| b.species == species)
            .ok_or_else(|| Error::MissingSpecies(species.to_string()))?;
        check_occupations(occupations, block.n())?;
        block.occupations = occupations.to_vec();
        Ok(())
    }

    /// Fills the `count` lowest deformed modes.
    pub fn occupy_lowest(&mut self, species: Species, count: usize) -> Result<()> {
        let occ: Vec<usize> = (0..count).collect();
        self.occupy(species, &occ)
    }

    /// Global occupied qubits of the trial Slater determinant.
    pub fn global_occupations(&self, space: &ModelSpace) -> Result<Vec<usize>> {
        self.check_against(space)?;
        let mut occ = Vec::new();
        for block in &self.blocks {
            let offset = space.block(block.species)?.offset;
            occ.extend(block.occupations.iter().map(|&o| o + offset));
        }
        occ.sort_unstable();
        Ok(occ)
    }

    pub fn particle_numbers(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.occupations.len()).collect()
    }

    /// Checks species, shapes, orthogonality and occupations against `space`.
    pub fn check_against(&self, space: &ModelSpace) -> Result<()> {
        if self.blocks.len() != space.blocks().len() {
            return Err(Error::Parse(format!(
                "deformation covers {} species, model space has {}",
                self.blocks.len(),
                space.blocks().len()
            )));
        }
        for (def, block) in self.blocks.iter().zip(space.blocks()) {
            if def.species != block.species {
                return Err(Error::MissingSpecies(block.species.to_string()));
            }
            let (rows, cols) = def.matrix.dim();
            if rows != block.len || cols != block.len {
                return Err(Error::Shape { rows, cols, expected: block.len });
            }
            def.validate()?;
        }
        Ok(())
    }
}

/// Seeded synthetic deformation `U = exp(strength * A)` with `A` a random
/// antisymmetric matrix acting inside each species block.
pub fn generate_deformation<T: Real>(space: &ModelSpace, seed: u64, strength: f64) -> DeformedBasis<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = space
        .blocks()
        .iter()
        .map(|b| {
            let n = b.len;
            let mut a = DMatrix::<f64>::zeros(n, n);
            for r in 0..n {
                for c in (r + 1)..n {
                    let x: f64 = rng.gen_range(-1.0..1.0);
                    a[(r, c)] = x;
                    a[(c, r)] = -x;
                }
            }
            let u = if strength == 0.0 { DMatrix::identity(n, n) } else { (a * strength).exp() };
            let matrix = Array2::from_shape_fn((n, n), |(r, c)| T::of(u[(r, c)]));
            SpeciesDeformation { species: b.species, matrix, occupations: Vec::new() }
        })
        .collect();
    DeformedBasis { blocks }
}

/// On-disk layout of one species document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeformationDocument {
    pub species: Species,
    pub n: usize,
    pub matrix: Vec<Vec<f64>>,
    pub occupations: Vec<usize>,
}

/// Run manifest referencing one document per species.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeformationManifest {
    pub species_files: Vec<String>,
}

impl DeformationDocument {
    pub fn from_deformation<T: Real>(def: &SpeciesDeformation<T>) -> Self {
        DeformationDocument {
            species: def.species,
            n: def.n(),
            matrix: def.matrix.outer_iter().map(|row| row.iter().map(|v| v.f64()).collect()).collect(),
            occupations: def.occupations.clone(),
        }
    }

    pub fn into_deformation<T: Real>(self) -> Result<SpeciesDeformation<T>> {
        let n = self.n;
        if self.matrix.len() != n {
            return Err(Error::Shape { rows: self.matrix.len(), cols: self.matrix.first().map_or(0, Vec::len), expected: n });
        }
        if let Some(row) = self.matrix.iter().find(|r| r.len() != n) {
            return Err(Error::Shape { rows: self.matrix.len(), cols: row.len(), expected: n });
        }
        let matrix = Array2::from_shape_fn((n, n), |(r, c)| T::of(self.matrix[r][c]));
        let def = SpeciesDeformation { species: self.species, matrix, occupations: self.occupations };
        def.validate()?;
        Ok(def)
    }
}

/// Loads either a single species document or a manifest listing several.
/// Manifest paths are resolved relative to the manifest's directory.
pub fn load_deformation<T: Real>(path: impl AsRef<Path>) -> Result<DeformedBasis<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("species_files").is_some() {
        let manifest: DeformationManifest = serde_json::from_value(value)?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let mut blocks = Vec::new();
        for file in &manifest.species_files {
            let doc: DeformationDocument = serde_json::from_str(&fs::read_to_string(dir.join(file))?)?;
            blocks.push(doc.into_deformation()?);
        }
        blocks.sort_by_key(|b| b.species);
        Ok(DeformedBasis { blocks })
    } else {
        let doc: DeformationDocument = serde_json::from_value(value)?;
        Ok(DeformedBasis { blocks: vec![doc.into_deformation()?] })
    }
}

/// Writes one document per species plus a manifest named `manifest.json`.
pub fn save_deformation<T: Real>(basis: &DeformedBasis<T>, dir: impl AsRef<Path>) -> Result<std::path::PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for block in &basis.blocks {
        let name = format!("deformation_{}.json", block.species);
        let doc = DeformationDocument::from_deformation(block);
        fs::write(dir.join(&name), serde_json::to_string_pretty(&doc)?)?;
        files.push(name);
    }
    let manifest = dir.join("manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&DeformationManifest { species_files: files })?)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(list: &[(Species, f64)]) -> Vec<ShellSpec> {
        list.iter().map(|&(species, j)| ShellSpec { species, j }).collect()
    }

    #[test]
    fn sd_shell_has_twelve_modes_per_species() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        assert_eq!(space.n_modes(), 24);
        assert_eq!(space.block(Species::Proton).unwrap().len, 12);
        assert_eq!(space.block(Species::Neutron).unwrap().offset, 12);
    }

    #[test]
    fn single_shell_enumerates_m_ascending() {
        let space = build_space(&spec(&[(Species::Neutron, 1.5)])).unwrap();
        let ms: Vec<i32> = space.modes().iter().map(|m| m.two_m).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
    }

    #[test]
    fn ordering_is_species_then_j_then_m() {
        let space = build_space(&spec(&[(Species::Neutron, 0.5), (Species::Proton, 2.5), (Species::Proton, 0.5)])).unwrap();
        let key: Vec<(Species, u32, i32)> = space.modes().iter().map(|m| (m.species, m.two_j, m.two_m)).collect();
        let mut sorted = key.clone();
        sorted.sort();
        assert_eq!(key, sorted);
        assert_eq!(space.modes()[0].species, Species::Proton);
        for q in 0..space.n_modes() {
            let p = space.partner(q);
            assert_eq!(space.modes()[p].two_m, -space.modes()[q].two_m);
            assert_eq!(space.modes()[p].two_j, space.modes()[q].two_j);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(build_space(&[]), Err(Error::EmptySpace)));
        assert!(matches!(build_space(&spec(&[(Species::Proton, 1.0)])), Err(Error::InvalidJ(_))));
        assert!(matches!(build_space(&spec(&[(Species::Proton, 0.7)])), Err(Error::InvalidJ(_))));
        assert!(matches!(build_space(&spec(&[(Species::Proton, -0.5)])), Err(Error::InvalidJ(_))));
    }

    #[test]
    fn space_serialization_round_trips() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        let text = serde_json::to_string(&space).unwrap();
        let back: ModelSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(space, back);
    }

    #[test]
    fn zero_strength_is_identity() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        for seed in [0, 3, 99] {
            let basis = generate_deformation::<f64>(&space, seed, 0.0);
            assert!(basis.blocks.iter().all(|b| b.is_identity()));
        }
    }

    #[test]
    fn generated_deformation_is_orthogonal_and_deterministic() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        let a = generate_deformation::<f64>(&space, 7, 1.0);
        let b = generate_deformation::<f64>(&space, 7, 1.0);
        assert_eq!(a, b);
        for block in &a.blocks {
            assert!(block.orthogonality_residual() <= 1e-12);
            assert!(!block.is_identity());
        }
        assert_ne!(a.blocks[0].matrix, a.blocks[1].matrix);
    }

    #[test]
    fn occupation_validation() {
        let space = ModelSpace::sd_shell(&[Species::Proton]);
        let mut basis = DeformedBasis::<f64>::identity(&space);
        assert!(matches!(basis.occupy(Species::Proton, &[0, 0]), Err(Error::DuplicateOccupation(0))));
        assert!(matches!(basis.occupy(Species::Proton, &[12]), Err(Error::OccupationOutOfRange { .. })));
        assert!(matches!(basis.occupy(Species::Neutron, &[0]), Err(Error::MissingSpecies(_))));
        basis.occupy(Species::Proton, &[0, 1]).unwrap();
        assert_eq!(basis.global_occupations(&space).unwrap(), vec![0, 1]);
    }

    fn write_doc(dir: &Path, name: &str, doc: &serde_json::Value) -> std::path::PathBuf {
        let path = dir.join(name);
        fs::write(&path, doc.to_string()).unwrap();
        path
    }

    #[test]
    fn load_identity_document() {
        let dir = tempfile::tempdir().unwrap();
        let eye: Vec<Vec<f64>> = (0..4).map(|r| (0..4).map(|c| if r == c { 1.0 } else { 0.0 }).collect()).collect();
        let doc = serde_json::json!({"species": "neutron", "n": 4, "matrix": eye, "occupations": [0, 1]});
        let basis: DeformedBasis<f64> = load_deformation(write_doc(dir.path(), "n.json", &doc)).unwrap();
        assert!(basis.blocks[0].is_identity());
        assert_eq!(basis.blocks[0].occupations, vec![0, 1]);
    }

    #[test]
    fn load_rejects_non_orthogonal_with_residual() {
        let dir = tempfile::tempdir().unwrap();
        let mut m: Vec<Vec<f64>> = (0..2).map(|r| (0..2).map(|c| if r == c { 1.0 } else { 0.0 }).collect()).collect();
        m[0][0] = 1.0 + 5e-4;
        let doc = serde_json::json!({"species": "proton", "n": 2, "matrix": m, "occupations": [0]});
        match load_deformation::<f64>(write_doc(dir.path(), "p.json", &doc)) {
            Err(Error::NotOrthogonal { residual }) => assert!((residual - 1.00025e-3).abs() < 1e-6, "{residual}"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_shape_and_occupations() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<Vec<f64>> = (0..13).map(|r| (0..12).map(|c| if r == c { 1.0 } else { 0.0 }).collect()).collect();
        let doc = serde_json::json!({"species": "proton", "n": 12, "matrix": rows, "occupations": []});
        assert!(matches!(load_deformation::<f64>(write_doc(dir.path(), "a.json", &doc)), Err(Error::Shape { .. })));

        let doc = serde_json::json!({"species": "proton", "n": 1, "matrix": [[1.0]], "occupations": [1]});
        assert!(matches!(
            load_deformation::<f64>(write_doc(dir.path(), "b.json", &doc)),
            Err(Error::OccupationOutOfRange { .. })
        ));
    }

    #[test]
    fn manifest_round_trip() {
        let space = ModelSpace::sd_shell(&[Species::Proton, Species::Neutron]);
        let mut basis = generate_deformation::<f64>(&space, 11, 0.8);
        basis.occupy_lowest(Species::Proton, 2).unwrap();
        basis.occupy_lowest(Species::Neutron, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_deformation(&basis, dir.path()).unwrap();
        let back: DeformedBasis<f64> = load_deformation(manifest).unwrap();
        back.check_against(&space).unwrap();
        for (a, b) in basis.blocks.iter().zip(&back.blocks) {
            assert_eq!(a.matrix, b.matrix);
            assert_eq!(a.occupations, b.occupations);
        }
    }
}
