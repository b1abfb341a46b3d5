//! Eigenvalue clustering, snapping onto the symmetry sets of the involution,
//! and reciprocal pairing.

use crate::error::{Error, Result};
use crate::mat::{Field, Involution, C64};

/// Eigenvalue clusters with exact symmetric values and pairing data.
#[derive(Clone, Debug)]
pub(crate) struct Spectrum {
    /// Snapped eigenvalue per cluster, sorted lexicographically by (re, im).
    pub values: Vec<C64>,
    /// Algebraic multiplicity per cluster.
    pub mult: Vec<usize>,
    /// Index of the cluster holding `1/λ` (T) or `1/λ̄` (H).
    pub partner: Vec<usize>,
    /// Orbits under reciprocal pairing (and conjugation for real input).
    pub classes: Vec<Vec<usize>>,
}

/// Partner of `λ`: `1/λ` under T, `1/λ̄` under H.
pub(crate) fn partner_value(v: C64, inv: Involution) -> C64 {
    match inv {
        Involution::T => v.inv(),
        Involution::H => v.conj().inv(),
    }
}

fn scale(v: C64) -> f64 {
    v.norm().max(1.0)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * scale(a).max(scale(b))
}

/// Single-linkage clustering with radius `tol·max(1, |λ|)`.
pub(crate) fn cluster(vals: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if close(vals[i], vals[j], tol) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn nearest(values: &[C64], target: C64, tol: f64) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| close(v, target, tol))
        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
        .map(|(i, _)| i)
}

/// Clusters nonzero finite eigenvalues and snaps each reciprocal class to exact symmetry.
pub(crate) fn analyze(raw: &[C64], inv: Involution, field: Field, tol: f64) -> Result<Spectrum> {
    let groups = cluster(raw, tol);
    let means: Vec<C64> = groups
        .iter()
        .map(|g| g.iter().map(|&i| raw[i]).sum::<C64>() / g.len() as f64)
        .collect();
    let mult: Vec<usize> = groups.iter().map(Vec::len).collect();
    let real = field == Field::Real;
    let k = means.len();

    let mut value: Vec<Option<C64>> = vec![None; k];
    let mut classes: Vec<Vec<usize>> = Vec::new();

    // Process clusters far from the unit circle first so representatives are stable.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        (means[b].norm().ln().abs())
            .total_cmp(&means[a].norm().ln().abs())
            .then(means[a].re.total_cmp(&means[b].re))
            .then(means[a].im.total_cmp(&means[b].im))
    });

    for &c in &order {
        if value[c].is_some() {
            continue;
        }
        let mut v = means[c];
        if v.norm() == 0.0 {
            return Err(Error::structure(
                "pairing",
                tol,
                "zero eigenvalue in a regular spectrum",
            ));
        }
        let f = |z: C64| partner_value(z, inv);
        let g = |z: C64| z.conj();
        // Project onto the fixed sets of the maps that keep v in its own cluster.
        if real && close(g(v), v, tol) {
            v = C64::new(v.re, 0.0);
        }
        if close(f(v), v, tol) {
            v = match inv {
                Involution::T => C64::new(v.re.signum(), 0.0),
                Involution::H => v / v.norm(),
            };
        }
        if real && close(f(g(v)), v, tol) {
            v /= v.norm();
        }
        let mut orbit = vec![v, f(v)];
        if real {
            orbit.push(g(v));
            orbit.push(f(g(v)));
        }
        let mut members = Vec::new();
        for w in orbit {
            let idx = nearest(&means, w, tol).ok_or_else(|| {
                Error::structure(
                    "pairing",
                    tol,
                    format!("eigenvalue {v} has no partner near {w}"),
                )
            })?;
            match value[idx] {
                None => {
                    value[idx] = Some(w);
                    members.push(idx);
                }
                Some(existing) if members.contains(&idx) => {
                    if !close(existing, w, tol) {
                        return Err(Error::structure(
                            "pairing",
                            tol,
                            format!("inconsistent class around {v}"),
                        ));
                    }
                }
                Some(_) => {
                    return Err(Error::structure(
                        "pairing",
                        tol,
                        format!("cluster near {w} claimed by two classes"),
                    ))
                }
            }
        }
        let m0 = mult[members[0]];
        if members.iter().any(|&i| mult[i] != m0) {
            return Err(Error::structure(
                "pairing",
                tol,
                format!("partners of {v} have different multiplicities"),
            ));
        }
        classes.push(members);
    }

    let values: Vec<C64> = value
        .into_iter()
        .map(|v| {
            let v = v.expect("assigned");
            // Normalize signed zeros so equal values compare and print identically.
            C64::new(v.re + 0.0, v.im + 0.0)
        })
        .collect();
    let mut perm: Vec<usize> = (0..k).collect();
    perm.sort_by(|&a, &b| lex(values[a], values[b]));
    let mut inv_perm = vec![0; k];
    for (new, &old) in perm.iter().enumerate() {
        inv_perm[old] = new;
    }
    let sorted_values: Vec<C64> = perm.iter().map(|&i| values[i]).collect();
    let sorted_mult: Vec<usize> = perm.iter().map(|&i| mult[i]).collect();
    let partner: Vec<usize> = sorted_values
        .iter()
        .map(|&v| nearest(&sorted_values, partner_value(v, inv), tol).expect("partner exists"))
        .collect();
    let mut classes: Vec<Vec<usize>> = classes
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| inv_perm[i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    classes.sort();
    Ok(Spectrum {
        values: sorted_values,
        mult: sorted_mult,
        partner,
        classes,
    })
}

pub(crate) fn lex(a: C64, b: C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Canonical representative of a class: `|λ| > 1` preferred, then `Im λ ≥ 0`.
pub(crate) fn representative(values: &[C64], class: &[usize]) -> usize {
    let key = |i: usize| {
        let v = values[i];
        let outside = v.norm() > 1.0 + 1e-12;
        let upper = v.im >= -1e-12;
        (outside, upper)
    };
    *class
        .iter()
        .max_by(|&&a, &&b| {
            key(a)
                .cmp(&key(b))
                .then(values[a].im.total_cmp(&values[b].im))
                .then(values[a].re.total_cmp(&values[b].re))
        })
        .expect("nonempty class")
}
