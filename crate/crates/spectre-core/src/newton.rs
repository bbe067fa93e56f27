//! Newton polyhedron at infinity, convenience and nondegeneracy checks,
//! Newton weights delta / delta*, and the Newton spectrum.

use crate::error::{Error, Result};
use crate::exactalg::matrix::QMatrix;
use crate::exactalg::rational::{rat_int, Rational};
use crate::groebner::{has_torus_zero, milnor_data};
use crate::lattice::SpectrumMultiset;
use crate::poly::{Monomial, MultiPoly};
use num::{One, Signed};
use std::collections::BTreeSet;

/// A facet of the Newton polyhedron not containing the origin, normalized so
/// its linear form L(nu) = <normal, nu> is identically 1 on the facet.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub points: Vec<Monomial>,
}

impl Facet {
    pub fn eval(&self, m: &Monomial) -> Rational {
        self.normal
            .iter()
            .zip(&m.0)
            .map(|(w, &e)| w * Rational::from_integer(e.into()))
            .sum()
    }

    /// L(nu + 1), the shifted form used by delta*.
    pub fn eval_shifted(&self, m: &Monomial) -> Rational {
        self.normal
            .iter()
            .zip(&m.0)
            .map(|(w, &e)| w * Rational::from_integer((e + 1).into()))
            .sum()
    }
}

/// Newton polyhedron at infinity: convex hull of the support of f and the origin.
/// Only the facets not containing the origin are listed.
#[derive(Debug, Clone)]
pub struct NewtonPolyhedron {
    pub nvars: usize,
    pub support: Vec<Monomial>,
    pub facets: Vec<Facet>,
}

/// Exact facet list by brute-force hyperplane enumeration over point subsets.
pub fn newton_polyhedron(f: &MultiPoly) -> Result<NewtonPolyhedron> {
    assert!(!f.is_zero(), "zero polynomial has no Newton polyhedron");
    let d = f.nvars();
    let mut pts: Vec<Monomial> = f.support().cloned().collect();
    let origin = Monomial::one(d);
    if !pts.contains(&origin) {
        pts.push(origin.clone());
    }
    pts.sort();

    let nonzero: Vec<&Monomial> = pts.iter().filter(|m| m.total_degree() > 0).collect();
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();

    for subset in subsets_of_size(nonzero.len(), d) {
        // Solve <w, p> = 1 for the points of the subset.
        let mat = QMatrix::from_fn(d, d, |r, c| {
            Rational::from_integer(nonzero[subset[r]].0[c].into())
        });
        let Ok(inv) = mat.inverse() else { continue };
        let w: Vec<Rational> = (0..d)
            .map(|i| (0..d).map(|r| inv[(i, r)].clone()).sum())
            .collect();
        if seen.contains(&w) {
            continue;
        }
        // Keep hyperplanes with every support point on the closed side L <= 1.
        let facet = Facet {
            normal: w.clone(),
            points: Vec::new(),
        };
        if pts.iter().all(|p| facet.eval(p) <= Rational::one()) {
            let on_face: Vec<Monomial> = pts
                .iter()
                .filter(|p| facet.eval(p) == Rational::one())
                .cloned()
                .collect();
            seen.insert(w.clone());
            facets.push(Facet {
                normal: w,
                points: on_face,
            });
        }
    }

    if facets.is_empty() {
        let rank_mat = QMatrix::from_fn(pts.len(), d, |r, c| {
            Rational::from_integer(pts[r].0[c].into())
        });
        return Err(Error::DegeneratePolyhedron {
            dim: crate::exactalg::matrix::mat_rank(&rank_mat),
            ambient: d,
        });
    }

    facets.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(NewtonPolyhedron {
        nvars: d,
        support: pts,
        facets,
    })
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Largest pure-power exponent of each variable appearing in f (0 when none).
pub fn axis_intercepts(f: &MultiPoly) -> Vec<u32> {
    let n = f.nvars();
    let mut out = vec![0u32; n];
    for m in f.support() {
        let support: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
        if support.len() == 1 {
            let i = support[0];
            out[i] = out[i].max(m.0[i]);
        }
    }
    out
}

/// Kouchnirenko's condition: every variable appears as a pure power.
pub fn is_convenient(f: &MultiPoly) -> bool {
    axis_intercepts(f).iter().all(|&a| a >= 1)
}

/// Name of the first variable without a pure power, for error reporting.
pub fn first_inconvenient_var(f: &MultiPoly) -> Option<String> {
    axis_intercepts(f)
        .iter()
        .position(|&a| a == 0)
        .map(|i| f.vars[i].clone())
}

fn toric_partials(p: &MultiPoly) -> Vec<MultiPoly> {
    (0..p.nvars())
        .map(|i| {
            let xi = MultiPoly::var(&p.vars, i);
            p.partial(i).expect("index in range").mul(&xi).expect("same ring")
        })
        .collect()
}

/// Nondegeneracy with respect to the Newton polyhedron at infinity: no face
/// polynomial (over any face not containing the origin) has a critical point
/// in the torus.
///
/// Faces are enumerated as intersections of facet subsets, applied to f and
/// to every restriction of f to a coordinate subspace; for convenient f this
/// covers every face of every dimension not containing the origin.
pub fn is_nondegenerate(f: &MultiPoly) -> bool {
    let n = f.nvars();
    let mut face_supports: BTreeSet<Vec<Monomial>> = BTreeSet::new();

    for kill_mask in 0u32..(1 << n) {
        let kill: Vec<usize> = (0..n).filter(|&i| kill_mask & (1 << i) != 0).collect();
        let g = f.restrict_to_zero(&kill);
        if g.is_zero() || g.is_constant() {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| kill_mask & (1 << i) == 0).collect();
        // Project to the surviving variables so the hull is full-dimensional there.
        let sub_vars: Vec<String> = keep.iter().map(|&i| f.vars[i].clone()).collect();
        let mut projected = MultiPoly::zero(&sub_vars);
        for (m, c) in g.terms() {
            let exps: Vec<u32> = keep.iter().map(|&i| m.0[i]).collect();
            projected.insert_term(Monomial(exps), c.clone());
        }
        let Ok(np) = newton_polyhedron(&projected) else {
            continue;
        };
        let nf = np.facets.len();
        for mask in 1u64..(1 << nf) {
            let mut pts: Option<BTreeSet<Monomial>> = None;
            for (fi, facet) in np.facets.iter().enumerate() {
                if mask & (1 << fi) == 0 {
                    continue;
                }
                let set: BTreeSet<Monomial> = facet.points.iter().cloned().collect();
                pts = Some(match pts {
                    None => set,
                    Some(prev) => prev.intersection(&set).cloned().collect(),
                });
            }
            let pts = pts.unwrap_or_default();
            if pts.is_empty() {
                continue;
            }
            // Lift back to the ambient exponent lattice.
            let lifted: Vec<Monomial> = pts
                .iter()
                .map(|m| {
                    let mut exps = vec![0u32; n];
                    for (pos, &i) in keep.iter().enumerate() {
                        exps[i] = m.0[pos];
                    }
                    Monomial(exps)
                })
                .collect();
            let mut key = lifted.clone();
            key.sort();
            face_supports.insert(key);
        }
    }

    for support in &face_supports {
        let mut face_poly = MultiPoly::zero(&f.vars);
        for m in support {
            face_poly.insert_term(m.clone(), f.coeff(m));
        }
        if face_poly.is_zero() {
            continue;
        }
        if has_torus_zero(&toric_partials(&face_poly)) {
            return false;
        }
    }
    true
}

/// delta*(u) = max over facets sigma and support nu of L_sigma(nu + 1).
pub fn delta_star(u: &MultiPoly, np: &NewtonPolyhedron) -> Result<Rational> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(u.support()
        .map(|m| delta_star_monomial(m, np))
        .max()
        .expect("nonzero polynomial"))
}

/// delta(u) = max over facets sigma and support nu of L_sigma(nu).
pub fn delta(u: &MultiPoly, np: &NewtonPolyhedron) -> Result<Rational> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(u.support()
        .map(|m| delta_monomial(m, np))
        .max()
        .expect("nonzero polynomial"))
}

pub fn delta_star_monomial(m: &Monomial, np: &NewtonPolyhedron) -> Rational {
    np.facets
        .iter()
        .map(|f| f.eval_shifted(m))
        .max()
        .expect("polyhedron has at least one facet")
}

pub fn delta_monomial(m: &Monomial, np: &NewtonPolyhedron) -> Rational {
    np.facets
        .iter()
        .map(|f| f.eval(m))
        .max()
        .expect("polyhedron has at least one facet")
}

/// Options for the Newton spectrum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NewtonSpectrumOptions {
    /// Skip the (potentially expensive) nondegeneracy check.
    pub skip_nondegeneracy_check: bool,
}

/// The Newton spectrum of a convenient nondegenerate polynomial: jumps of the
/// increasing filtration by delta* on the Milnor algebra.
pub fn newton_spectrum(f: &MultiPoly) -> Result<SpectrumMultiset> {
    newton_spectrum_with(f, NewtonSpectrumOptions::default())
}

pub fn newton_spectrum_with(
    f: &MultiPoly,
    opts: NewtonSpectrumOptions,
) -> Result<SpectrumMultiset> {
    if let Some(var) = first_inconvenient_var(f) {
        return Err(Error::NotConvenient { var });
    }
    let np = newton_polyhedron(f)?;
    if !opts.skip_nondegeneracy_check && !is_nondegenerate(f) {
        return Err(Error::NewtonDegenerate);
    }
    let md = milnor_data(f)?;
    let n = f.nvars();

    if md.mu == 0 {
        return Ok(SpectrumMultiset::empty());
    }

    // Positive facet coefficients (guaranteed by convenience) give a degree
    // bound for the monomials entering each filtration level.
    let mut w_min: Option<Rational> = None;
    for facet in &np.facets {
        for w in &facet.normal {
            if !w.is_positive() {
                return Err(Error::Inconsistency(
                    "convenient polyhedron has a non-positive facet coefficient".into(),
                ));
            }
            w_min = Some(match w_min {
                None => w.clone(),
                Some(m) => m.min(w.clone()),
            });
        }
    }
    let w_min = w_min.expect("at least one facet");

    let mut cap = Rational::from_integer((n as i64 + 1).into());
    let hard_cap = Rational::from_integer((8 * (n as i64 + 1)).into());
    loop {
        if let Some(spectrum) = sweep_spectrum(&md, &np, &w_min, &cap)? {
            return Ok(spectrum);
        }
        cap *= rat_int(2);
        if cap > hard_cap {
            return Err(Error::Inconsistency(
                "Newton filtration failed to exhaust the Milnor algebra".into(),
            ));
        }
    }
}

fn sweep_spectrum(
    md: &crate::groebner::MilnorData,
    np: &NewtonPolyhedron,
    w_min: &Rational,
    cap: &Rational,
) -> Result<Option<SpectrumMultiset>> {
    let n = np.nvars;
    // Box bound: L(nu + 1) <= cap on any one facet forces nu_i <= cap/w_min.
    let bound_rat = cap / w_min;
    let bound = crate::exactalg::rational::floor_i64(&bound_rat).max(0) as u32;
    let mut candidates: Vec<(Rational, Monomial)> = Vec::new();
    let mut stack = vec![0u32; n];
    enumerate_box(&mut stack, 0, bound, &mut |exps| {
        let m = Monomial(exps.to_vec());
        let ds = delta_star_monomial(&m, np);
        if &ds <= cap {
            candidates.push((ds, m));
        }
    });
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut spectrum = SpectrumMultiset::empty();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rank = 0usize;
    let mut i = 0;
    while i < candidates.len() {
        let level = candidates[i].0.clone();
        while i < candidates.len() && candidates[i].0 == level {
            let u = MultiPoly::monomial_term(&md.f.vars, candidates[i].1.clone(), Rational::one());
            rows.push(md.nf_coords(&u));
            i += 1;
        }
        let mat = QMatrix::from_rows(rows.clone());
        let new_rank = crate::exactalg::matrix::mat_rank(&mat);
        if new_rank > rank {
            spectrum.insert(level, (new_rank - rank) as u64);
            rank = new_rank;
        }
        if rank == md.mu {
            return Ok(Some(spectrum));
        }
    }
    Ok(None)
}

fn enumerate_box(stack: &mut Vec<u32>, i: usize, bound: u32, visit: &mut impl FnMut(&[u32])) {
    if i == stack.len() {
        visit(stack);
        return;
    }
    for e in 0..=bound {
        stack[i] = e;
        enumerate_box(stack, i + 1, bound, visit);
    }
    stack[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::rat;
    use crate::poly::{parse, var_list};
    use num::Zero;

    fn xy() -> Vec<String> {
        var_list(&["x", "y"])
    }

    fn p(s: &str) -> MultiPoly {
        parse(s, &xy()).unwrap()
    }

    #[test]
    fn polyhedron_examples() {
        // x^3 + y^3: one L-facet, L = (u + v)/3
        let np = newton_polyhedron(&p("x^3 + y^3")).unwrap();
        assert_eq!(np.facets.len(), 1);
        assert_eq!(np.facets[0].normal, vec![rat(1, 3), rat(1, 3)]);
        assert_eq!(np.facets[0].points.len(), 2);

        // 1/3x^3 - x + 1/2y^2: one L-facet, L = u/3 + v/2
        let np = newton_polyhedron(&p("1/3x^3 - x + 1/2y^2")).unwrap();
        assert_eq!(np.facets.len(), 1);
        assert_eq!(np.facets[0].normal, vec![rat(1, 3), rat(1, 2)]);

        // n = 0 ambient: f = x -> single vertex facet, L = u
        let vars = var_list(&["x"]);
        let np = newton_polyhedron(&parse("x", &vars).unwrap()).unwrap();
        assert_eq!(np.facets.len(), 1);
        assert_eq!(np.facets[0].normal, vec![rat(1, 1)]);

        // degenerate: support on one axis in two variables
        match newton_polyhedron(&p("x + x^2")) {
            Err(Error::DegeneratePolyhedron { dim: 1, ambient: 2 }) => {}
            other => panic!("expected degenerate, got {other:?}"),
        }
    }

    #[test]
    fn facet_soundness() {
        for f in ["x^3 + y^3", "1/3x^3 - x + 1/2y^2", "x^4 + y^4 + x^2y^2", "x^2 + y^3 + x*y"] {
            let f = p(f);
            let np = newton_polyhedron(&f).unwrap();
            for facet in &np.facets {
                for pt in &np.support {
                    let v = facet.eval(pt);
                    assert!(v <= Rational::one());
                    assert_eq!(v == Rational::one(), facet.points.contains(pt));
                }
            }
        }
    }

    #[test]
    fn convenience_examples() {
        assert!(is_convenient(&p("x^3 + y^3")));
        assert!(!is_convenient(&p("x^3 + x*y")));
        assert!(is_convenient(&p("1/3x^3 - x + 1/2y^2")));
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(is_nondegenerate(&p("x^3 + y^3")));
        assert!(is_nondegenerate(&p("x^2 + y^2")));
        assert!(is_nondegenerate(&p("x^4 + y^4 + x^2y^2")));
        // x^2 + y^2 + 2xy = (x+y)^2: the full face has a toric critical point.
        assert!(!is_nondegenerate(&p("x^2 + 2x*y + y^2")));
    }

    #[test]
    fn delta_star_examples() {
        let f = p("1/3x^3 - x + 1/2y^2");
        let np = newton_polyhedron(&f).unwrap();
        assert_eq!(delta_star(&p("1"), &np).unwrap(), rat(5, 6));
        assert_eq!(delta_star(&p("x"), &np).unwrap(), rat(7, 6));

        let np = newton_polyhedron(&p("x^3 + y^3")).unwrap();
        assert_eq!(delta_star(&p("x*y"), &np).unwrap(), rat(4, 3));
        assert!(delta_star(&MultiPoly::zero(&xy()), &np).is_err());
    }

    #[test]
    fn newton_spectrum_examples() {
        let s = newton_spectrum(&p("x^3 + y^3")).unwrap();
        assert_eq!(s.to_pairs(), vec![(rat(2, 3), 1), (rat(1, 1), 2), (rat(4, 3), 1)]);

        let s = newton_spectrum(&p("1/3x^3 - x + 1/2y^2")).unwrap();
        assert_eq!(s.to_pairs(), vec![(rat(5, 6), 1), (rat(7, 6), 1)]);

        let s = newton_spectrum(&p("x^2 + y^2")).unwrap();
        assert_eq!(s.to_pairs(), vec![(rat(1, 1), 1)]);

        assert!(matches!(
            newton_spectrum(&p("x^3 + x*y")),
            Err(Error::NotConvenient { .. })
        ));
    }

    #[test]
    fn newton_spectrum_properties() {
        // Total multiplicity mu, symmetry about (n+1)/2, minimal number simple.
        for (f, mu) in [("x^3 + y^3", 4), ("x^4 + y^4 + x^2y^2", 9), ("x^2 + y^3", 2)] {
            let f = p(f);
            let s = newton_spectrum(&f).unwrap();
            assert_eq!(s.total(), mu);
            assert!(s.is_symmetric(&rat(2, 1)));
            let (min_beta, min_mult) = s.to_pairs().first().cloned().unwrap();
            assert_eq!(min_mult, 1, "minimal spectral number of {} is simple", f);
            assert!(min_beta > Rational::zero());
        }
    }

    #[test]
    fn subadditivity_of_delta() {
        let f = p("x^4 + y^4 + x^2y^2");
        let np = newton_polyhedron(&f).unwrap();
        for a in 0..4u32 {
            for b in 0..4u32 {
                for c in 0..4u32 {
                    for d in 0..4u32 {
                        let u = Monomial(vec![a, b]);
                        let v = Monomial(vec![c, d]);
                        let uv = u.mul(&v);
                        assert!(
                            delta_monomial(&uv, &np)
                                <= delta_monomial(&u, &np) + delta_monomial(&v, &np)
                        );
                    }
                }
            }
        }
    }
}
