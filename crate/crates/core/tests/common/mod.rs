//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use maxwell_trees::dual::DualPoint;
use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::topology::Tree;

pub fn config(dim: usize, points: &[&[f64]]) -> BoundaryConfig {
    let rows: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    BoundaryConfig::new(dim, &rows).unwrap()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn equilateral() -> BoundaryConfig {
    config(2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]])
}

pub fn obtuse() -> BoundaryConfig {
    config(2, &[&[0.0, 0.0], &[1.0, 0.0], &[-0.6, 0.3]])
}

pub fn unit_square() -> BoundaryConfig {
    config(2, &[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]])
}

pub fn star3() -> Tree {
    Tree::new(4, 3, vec![(0, 3), (1, 3), (2, 3)]).unwrap()
}

/// Terminals 1 and 4 (left side of the unit square) share a Steiner point.
pub fn square_paired() -> Tree {
    Tree::new(6, 4, vec![(0, 4), (3, 4), (4, 5), (1, 5), (2, 5)]).unwrap()
}

/// Boundary vertices reachable from `start` without crossing edge index `skip`.
pub fn side(tree: &Tree, start: usize, skip: usize) -> Vec<usize> {
    let mut seen = vec![false; tree.vertex_count()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for (i, &(a, b)) in tree.edges().iter().enumerate() {
            if i == skip {
                continue;
            }
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..tree.boundary_count()).filter(|&k| seen[k]).collect()
}

pub fn block_sum(theta: &DualPoint, subset: &[usize]) -> Vec<f64> {
    let mut s = vec![0.0; theta.m()];
    for &k in subset {
        for (a, b) in s.iter_mut().zip(theta.block(k)) {
            *a += b;
        }
    }
    s
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest violation of the balance equation and of every edge cylinder,
/// with the sides recomputed from scratch.
pub fn body_violation(theta: &DualPoint, tree: &Tree) -> f64 {
    let all: Vec<usize> = (0..tree.boundary_count()).collect();
    let mut worst = norm(&block_sum(theta, &all));
    for (i, &(a, _)) in tree.edges().iter().enumerate() {
        worst = worst.max(norm(&block_sum(theta, &side(tree, a, i))) - 1.0);
    }
    worst.max(0.0)
}

/// Minimizer of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

/// Length of the symmetric paired network on the unit square with Steiner
/// points `(a, 1/2)` and `(1 - a, 1/2)`.
pub fn square_paired_length(a: f64) -> f64 {
    4.0 * (a * a + 0.25).sqrt() + (1.0 - 2.0 * a)
}
