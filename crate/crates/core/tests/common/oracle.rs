//! Brute-force LP oracle: eliminate equalities and fixed variables, then
//! enumerate every intersection of `d` remaining hyperplanes in the reduced
//! space and keep the cheapest feasible one. Only valid for bounded problems.

#![allow(clippy::needless_range_loop)]

use bmsim_core::lp::{LpProblem, Relation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    Optimal(f64),
    Infeasible,
}

const TOL: f64 = 1e-9;

/// Solves `m x = rhs` for square `m` by Gaussian elimination; `None` if singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let d = rhs.len();
    for c in 0..d {
        let p = (c..d).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-10 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in c + 1..d {
            let f = m[r][c] / m[c][c];
            if f != 0.0 {
                for k in c..d {
                    m[r][k] -= f * m[c][k];
                }
                rhs[r] -= f * rhs[c];
            }
        }
    }
    let mut z = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|k| m[r][k] * z[k]).sum();
        z[r] = (rhs[r] - s) / m[r][r];
    }
    Some(z)
}

/// Affine parametrisation `x = x0 + N z` of `{x : E x = f}`.
fn nullspace(rows: Vec<(Vec<f64>, f64)>, n: usize) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut a: Vec<Vec<f64>> = rows.iter().map(|(r, _)| r.clone()).collect();
    let mut b: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == a.len() {
            break;
        }
        let p = (r..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c].abs() < 1e-10 {
            continue;
        }
        a.swap(r, p);
        b.swap(r, p);
        let d = a[r][c];
        for k in 0..n {
            a[r][k] /= d;
        }
        b[r] /= d;
        for i in 0..a.len() {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c];
                for k in 0..n {
                    a[i][k] -= f * a[r][k];
                }
                b[i] -= f * b[r];
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|v| v.abs() > 1e-7) {
        return None;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut x0 = vec![0.0; n];
    for (row, &c) in pivots.iter().enumerate() {
        x0[c] = b[row];
    }
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = -a[row][f];
            }
            v
        })
        .collect();
    Some((x0, basis))
}

/// Number of free dimensions left after eliminating equalities and fixed
/// variables, and the number of hyperplanes the enumeration would combine.
pub fn reduced_size(p: &LpProblem) -> (usize, usize) {
    let n = p.num_vars();
    let (_, eqs) = equality_rows(p);
    let rank = nullspace(eqs, n).map_or(0, |(_, b)| b.len());
    let hyper = p
        .bounds
        .iter()
        .filter(|(l, u)| l != u)
        .map(|(l, u)| l.is_finite() as usize + u.is_finite() as usize)
        .sum::<usize>()
        + p.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    (rank, hyper)
}

fn equality_rows(p: &LpProblem) -> (usize, Vec<(Vec<f64>, f64)>) {
    let n = p.num_vars();
    let mut eqs = Vec::new();
    for con in &p.constraints {
        if con.relation == Relation::Eq {
            let mut row = vec![0.0; n];
            for &(j, a) in &con.coeffs {
                row[j] += a;
            }
            eqs.push((row, con.rhs));
        }
    }
    for (j, &(l, u)) in p.bounds.iter().enumerate() {
        if l == u {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            eqs.push((row, l));
        }
    }
    (n, eqs)
}

pub fn vertex_min(p: &LpProblem) -> Oracle {
    let (n, eqs) = equality_rows(p);
    let Some((x0, basis)) = nullspace(eqs, n) else {
        return Oracle::Infeasible;
    };
    let d = basis.len();
    let project = |row: &[f64]| -> Vec<f64> {
        basis.iter().map(|v| v.iter().zip(row).map(|(a, b)| a * b).sum()).collect()
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    // Hyperplanes g·z <= h in the reduced space.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for (j, &(l, u)) in p.bounds.iter().enumerate() {
        if l == u {
            continue;
        }
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let g = project(&e);
        if u.is_finite() {
            planes.push((g.clone(), u - x0[j]));
        }
        if l.is_finite() {
            planes.push((g.iter().map(|v| -v).collect(), x0[j] - l));
        }
    }
    for con in &p.constraints {
        let mut row = vec![0.0; n];
        for &(j, a) in &con.coeffs {
            row[j] += a;
        }
        let g = project(&row);
        let h = con.rhs - dot(&row, &x0);
        match con.relation {
            Relation::Le => planes.push((g, h)),
            Relation::Ge => planes.push((g.iter().map(|v| -v).collect(), -h)),
            Relation::Eq => {}
        }
    }
    let (constant, planes): (Vec<_>, Vec<_>) = planes
        .into_iter()
        .partition(|(g, _)| g.iter().all(|v| v.abs() < 1e-12));
    if constant.iter().any(|(_, h)| *h < -1e-7) {
        return Oracle::Infeasible;
    }

    let objective = |z: &[f64]| -> f64 {
        let x: Vec<f64> = (0..n)
            .map(|j| x0[j] + basis.iter().zip(z).map(|(v, zk)| v[j] * zk).sum::<f64>())
            .collect();
        dot(&p.objective, &x)
    };
    let feasible = |z: &[f64]| {
        planes
            .iter()
            .all(|(g, h)| dot(g, z) <= h + 1e-7 * (1.0 + h.abs()))
    };

    if d == 0 {
        return if feasible(&[]) {
            Oracle::Optimal(objective(&[]))
        } else {
            Oracle::Infeasible
        };
    }
    if planes.len() < d {
        return Oracle::Infeasible;
    }

    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let m: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(z) = solve_square(m, rhs) {
            if feasible(&z) {
                let v = objective(&z);
                if best.is_none_or(|b| v < b - TOL) {
                    best = Some(v);
                }
            }
        }
        // Next combination in lexicographic order.
        let k = planes.len();
        let mut i = d;
        loop {
            if i == 0 {
                return best.map_or(Oracle::Infeasible, Oracle::Optimal);
            }
            i -= 1;
            if idx[i] < k - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
