//! Dense BFGS with an Armijo backtracking line search.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop once `max |grad_i|` falls to this value.
    pub grad_tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BfgsResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn inf_norm<T: Real>(g: &[T]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(v.abs().f64()))
}

pub fn minimize<T: Real, F>(mut f: F, x0: Vec<T>, opts: BfgsOptions) -> BfgsResult<T>
where
    F: FnMut(&[T]) -> (T, Vec<T>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut hinv = identity::<T>(n);
    let mut iterations = 0;
    let c1 = T::of(1e-4);
    let noise = T::epsilon() * T::of(8.0);
    while iterations < opts.max_iter {
        if inf_norm(&g) <= opts.grad_tol {
            break;
        }
        iterations += 1;
        let mut d: Vec<T> = (0..n).map(|i| -(0..n).map(|j| hinv[i * n + j] * g[j]).sum::<T>()).collect();
        let mut slope: T = d.iter().zip(&g).map(|(a, b)| *a * *b).sum();
        if !(slope < T::zero()) {
            hinv = identity(n);
            d = g.iter().map(|v| -*v).collect();
            slope = -g.iter().map(|v| *v * *v).sum::<T>();
        }
        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<T> = x.iter().zip(&d).map(|(a, b)| *a + alpha * *b).collect();
            let (fnew, gnew) = f(&xn);
            // close to the minimum the decrease drops below rounding of f,
            // so a smaller gradient alone also accepts the step
            let flat = fnew <= fx + noise * fx.abs().max(T::one()) && inf_norm(&gnew) < inf_norm(&g);
            if fnew <= fx + c1 * alpha * slope || flat {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            alpha = alpha * T::of(0.5);
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if hinv == identity(n) {
                break;
            }
            hinv = identity(n);
            continue;
        };
        let s: Vec<T> = xn.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = gnew.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let sy: T = s.iter().zip(&y).map(|(a, b)| *a * *b).sum();
        if sy > T::epsilon() * T::of(1e-4) {
            update_inverse(&mut hinv, &s, &y, sy);
        }
        x = xn;
        fx = fnew;
        g = gnew;
    }
    let grad_norm = inf_norm(&g);
    BfgsResult { x, value: fx, grad_norm, iterations, converged: grad_norm <= opts.grad_tol }
}

fn identity<T: Real>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn update_inverse<T: Real>(h: &mut [T], s: &[T], y: &[T], sy: T) {
    let n = s.len();
    let rho = T::one() / sy;
    let hy: Vec<T> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy: T = y.iter().zip(&hy).map(|(a, b)| *a * *b).sum();
    let factor = (T::one() + rho * yhy) * rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += factor * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            (v, vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)])
        };
        let r = minimize(f, vec![-1.2, 1.0], BfgsOptions { max_iter: 2000, grad_tol: 1e-10 });
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quadratic_in_f32() {
        let f = |x: &[f32]| (x[0] * x[0] + 3.0 * x[1] * x[1], vec![2.0 * x[0], 6.0 * x[1]]);
        let r = minimize(f, vec![1.0f32, -2.0], BfgsOptions { max_iter: 100, grad_tol: 1e-4 });
        assert!(r.converged);
    }
}
