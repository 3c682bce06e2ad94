//! Derivative-free local minimization (Nelder–Mead) with a projection hook.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub point: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    /// The simplex spread fell below the tolerance before the budget ran out.
    pub converged: bool,
}

/// Minimizes `f` from `start` with an axis-aligned initial simplex of edge `step`.
///
/// Every candidate is passed through `project` before evaluation. Stops when
/// `f_max − f_min ≤ tol` over the simplex or after `budget` evaluations.
pub fn nelder_mead<T, F, P>(mut f: F, project: P, start: &[T], step: T, tol: T, budget: usize) -> Minimum<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
    P: Fn(&mut Vec<T>),
{
    let n = start.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut evaluations = 0;
    let mut eval = |x: &mut Vec<T>, evaluations: &mut usize| -> T {
        project(x);
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    let f0 = eval(&mut x0, &mut evaluations);
    simplex.push((x0, f0));
    for k in 0..n {
        if evaluations >= budget {
            break;
        }
        let mut x = simplex[0].0.clone();
        x[k] = x[k] + step;
        let fx = eval(&mut x, &mut evaluations);
        simplex.push((x, fx));
    }
    if simplex.len() < n + 1 {
        let (point, value) = simplex.swap_remove(0);
        return Minimum { point, value, evaluations, converged: false };
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[n].1 - simplex[0].1;
        if spread <= tol || (spread.is_nan() && simplex[0].1 == simplex[n].1) {
            converged = true;
            break;
        }
        if evaluations >= budget {
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for (x, _) in &simplex[..n] {
            for (c, &xi) in centroid.iter_mut().zip(x) {
                *c = *c + xi;
            }
        }
        let nn = T::from_usize_lossy(n);
        centroid.iter_mut().for_each(|c| *c = *c / nn);
        let worst = simplex[n].0.clone();
        let along = |t: T| -> Vec<T> { centroid.iter().zip(&worst).map(|(&c, &w)| c + t * (c - w)).collect() };

        let mut reflected = along(T::one());
        let fr = eval(&mut reflected, &mut evaluations);
        if fr < simplex[0].1 {
            if evaluations < budget {
                let mut expanded = along(two);
                let fe = eval(&mut expanded, &mut evaluations);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            } else {
                simplex[n] = (reflected, fr);
            }
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        if evaluations >= budget {
            break;
        }
        let (mut contracted, outside) = if fr < simplex[n].1 { (along(half), true) } else { (along(-half), false) };
        let fc = eval(&mut contracted, &mut evaluations);
        if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
            simplex[n] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if evaluations >= budget {
                break;
            }
            let mut x: Vec<T> = best.iter().zip(&vertex.0).map(|(&b, &x)| b + half * (x - b)).collect();
            let fx = eval(&mut x, &mut evaluations);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (point, value) = simplex.swap_remove(0);
    Minimum { point, value, evaluations, converged }
}
