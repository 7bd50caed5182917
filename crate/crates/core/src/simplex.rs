//! Small Nelder-Mead minimizer for low-dimensional parameter searches.

use crate::scalar::{lit, Real};

#[derive(Clone, Debug)]
pub(crate) struct NelderMead<T> {
    pub max_iterations: usize,
    /// Stop once the spread of function values falls below this.
    pub f_tol: T,
    /// ... and the simplex diameter falls below this.
    pub x_tol: T,
}

#[derive(Clone, Debug)]
pub(crate) struct Minimum<T, const N: usize> {
    pub x: [T; N],
    #[cfg_attr(not(test), allow(dead_code))]
    pub f: T,
    pub evaluations: usize,
}

impl<T: Real> NelderMead<T> {
    /// Minimizes `f` from `start` with initial simplex edges `steps`.
    pub fn minimize<const N: usize>(&self, f: impl Fn(&[T; N]) -> T, start: [T; N], steps: [T; N]) -> Minimum<T, N> {
        let (alpha, gamma, rho, shrink) = (T::one(), lit::<T>(2.0), lit::<T>(0.5), lit::<T>(0.5));
        let mut evaluations = 0;
        let mut eval = |x: &[T; N]| {
            evaluations += 1;
            let v = f(x);
            if v.is_nan() {
                T::infinity()
            } else {
                v
            }
        };

        let mut simplex: Vec<([T; N], T)> = Vec::with_capacity(N + 1);
        simplex.push((start, eval(&start)));
        for d in 0..N {
            let mut x = start;
            x[d] = x[d] + steps[d];
            simplex.push((x, eval(&x)));
        }

        for _ in 0..self.max_iterations {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let best = simplex[0].1;
            let worst = simplex[N].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (*a - *b).abs())
                        .fold(T::zero(), T::max)
                })
                .fold(T::zero(), T::max);
            if (worst - best).abs() <= self.f_tol && diameter <= self.x_tol {
                break;
            }

            let mut centroid = [T::zero(); N];
            for (x, _) in &simplex[..N] {
                for d in 0..N {
                    centroid[d] = centroid[d] + x[d];
                }
            }
            let n: T = lit(N as f64);
            centroid.iter_mut().for_each(|c| *c = *c / n);

            let toward = |coef: T, from: &[T; N]| {
                let mut out = [T::zero(); N];
                for d in 0..N {
                    out[d] = centroid[d] + coef * (from[d] - centroid[d]);
                }
                out
            };

            let worst_x = simplex[N].0;
            let reflected = toward(-alpha, &worst_x);
            let f_reflected = eval(&reflected);
            if f_reflected < simplex[0].1 {
                let expanded = toward(-gamma, &worst_x);
                let f_expanded = eval(&expanded);
                simplex[N] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
                continue;
            }
            if f_reflected < simplex[N - 1].1 {
                simplex[N] = (reflected, f_reflected);
                continue;
            }
            let contracted = if f_reflected < worst {
                toward(-rho, &worst_x)
            } else {
                toward(rho, &worst_x)
            };
            let f_contracted = eval(&contracted);
            if f_contracted < worst.min(f_reflected) {
                simplex[N] = (contracted, f_contracted);
                continue;
            }
            let anchor = simplex[0].0;
            for (x, fx) in simplex.iter_mut().skip(1) {
                for d in 0..N {
                    x[d] = anchor[d] + shrink * (x[d] - anchor[d]);
                }
                *fx = eval(x);
            }
        }

        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (x, f) = simplex[0];
        Minimum { x, f, evaluations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead { max_iterations: 5000, f_tol: 1e-16, x_tol: 1e-10 };
        let m = nm.minimize(
            |x: &[f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            [-1.2, 1.0],
            [0.5, 0.5],
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn quadratic_3d() {
        let nm = NelderMead { max_iterations: 2000, f_tol: 1e-18, x_tol: 1e-10 };
        let m = nm.minimize(
            |x: &[f64; 3]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 3.0 * (x[2] - 2.0).powi(2),
            [0.0; 3],
            [1.0; 3],
        );
        assert!(m.f < 1e-12);
    }
}
