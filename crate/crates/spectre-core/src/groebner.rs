//! Buchberger's algorithm, normal forms with cofactors, and the Milnor algebra.

use crate::error::{Error, Result};
use crate::exactalg::rational::Rational;
use crate::poly::{Monomial, MultiPoly};
use num::{One, Zero};
use std::cmp::Ordering;

/// Monomial order tag. Grevlex is the default everywhere; lex exists so the
/// order-independence of Brieskorn reductions can be asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => a.grevlex(b),
            MonomialOrder::Lex => a.lex(b),
        }
    }
}

/// Leading term of a nonzero polynomial with respect to an order.
fn leading_term(p: &MultiPoly, order: MonomialOrder) -> Option<(Monomial, Rational)> {
    match order {
        MonomialOrder::GrevLex => p.leading_term().map(|(m, c)| (m.clone(), c.clone())),
        MonomialOrder::Lex => p
            .terms()
            .max_by(|(a, _), (b, _)| a.lex(b))
            .map(|(m, c)| (m.clone(), c.clone())),
    }
}

/// Remainder and cofactors of full multivariate division:
/// `p = sum_i cofactors[i] * gens[i] + remainder`, and no term of the
/// remainder is divisible by any leading term of `gens`.
pub fn divide_full(
    p: &MultiPoly,
    gens: &[MultiPoly],
    order: MonomialOrder,
) -> (Vec<MultiPoly>, MultiPoly) {
    let vars = &p.vars;
    let mut cofactors = vec![MultiPoly::zero(vars); gens.len()];
    let mut remainder = MultiPoly::zero(vars);
    let mut current = p.clone();
    let lts: Vec<Option<(Monomial, Rational)>> =
        gens.iter().map(|g| leading_term(g, order)).collect();
    while let Some((m, c)) = leading_term(&current, order) {
        let mut reduced = false;
        for (i, lt) in lts.iter().enumerate() {
            let Some((lm, lc)) = lt else { continue };
            if lm.divides(&m) {
                let factor_m = lm.div_into(&m);
                let factor_c = &c / lc;
                cofactors[i].insert_term(factor_m.clone(), factor_c.clone());
                let sub = gens[i].mul_term(&factor_m, &factor_c);
                current = current.sub(&sub).expect("same ring");
                reduced = true;
                break;
            }
        }
        if !reduced {
            remainder.insert_term(m.clone(), c.clone());
            let single = MultiPoly::monomial_term(vars, m, c);
            current = current.sub(&single).expect("same ring");
        }
    }
    (cofactors, remainder)
}

/// A reduced Groebner basis together with the expression of each basis
/// element in the input generators (`trafo[j][i]` multiplies input gen i).
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
    pub trafo: Vec<Vec<MultiPoly>>,
    pub input_len: usize,
}

impl GroebnerBasis {
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .filter_map(|g| leading_term(g, self.order).map(|(m, _)| m))
            .collect()
    }

    /// 1 lies in the ideal iff the reduced basis is a nonzero constant.
    pub fn contains_one(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_constant() && !self.generators[0].is_zero()
    }
}

/// Reduced Groebner basis by Buchberger's algorithm with the product and
/// chain criteria, tracking cofactors over the input generators.
pub fn buchberger(gens: &[MultiPoly], order: MonomialOrder) -> GroebnerBasis {
    assert!(!gens.is_empty(), "empty generator list");
    let vars = gens[0].vars.clone();
    let n_input = gens.len();

    struct Entry {
        poly: MultiPoly,
        lt: (Monomial, Rational),
        coeffs: Vec<MultiPoly>,
    }

    let mut basis: Vec<Entry> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let mut coeffs = vec![MultiPoly::zero(&vars); n_input];
        coeffs[i] = MultiPoly::one(&vars);
        // Reduce against what we already have to keep things small.
        let existing: Vec<MultiPoly> = basis.iter().map(|e| e.poly.clone()).collect();
        let (cof, rem) = divide_full(g, &existing, order);
        if rem.is_zero() {
            continue;
        }
        for (j, q) in cof.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for k in 0..n_input {
                let delta = q.mul(&basis[j].coeffs[k]).expect("same ring");
                coeffs[k] = coeffs[k].sub(&delta).expect("same ring");
            }
        }
        let lt = leading_term(&rem, order).unwrap();
        basis.push(Entry {
            poly: rem,
            lt,
            coeffs,
        });
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            pairs.push((i, j));
        }
    }
    let mut processed: std::collections::HashSet<(usize, usize)> = Default::default();

    while let Some(&(i, j)) = pairs.first() {
        pairs.remove(0);
        processed.insert((i, j));
        let (lm_i, lc_i) = basis[i].lt.clone();
        let (lm_j, lc_j) = basis[j].lt.clone();
        // Product criterion.
        if lm_i.is_coprime_with(&lm_j) {
            continue;
        }
        // Chain criterion: some k with LT_k | lcm(i,j) and both pairs handled.
        let lcm = lm_i.lcm(&lm_j);
        let chain = (0..basis.len()).any(|k| {
            if k == i || k == j {
                return false;
            }
            if !basis[k].lt.0.divides(&lcm) {
                return false;
            }
            let p1 = (i.min(k), i.max(k));
            let p2 = (j.min(k), j.max(k));
            processed.contains(&p1) && processed.contains(&p2)
        });
        if chain {
            continue;
        }
        // S-polynomial with cofactor tracking.
        let mi = lm_i.div_into(&lcm);
        let mj = lm_j.div_into(&lcm);
        let ci = lc_i.recip();
        let cj = lc_j.recip();
        let spoly = basis[i]
            .poly
            .mul_term(&mi, &ci)
            .sub(&basis[j].poly.mul_term(&mj, &cj))
            .expect("same ring");
        let mut coeffs = vec![MultiPoly::zero(&vars); n_input];
        for k in 0..n_input {
            let a = basis[i].coeffs[k].mul_term(&mi, &ci);
            let b = basis[j].coeffs[k].mul_term(&mj, &cj);
            coeffs[k] = a.sub(&b).expect("same ring");
        }
        let current: Vec<MultiPoly> = basis.iter().map(|e| e.poly.clone()).collect();
        let (cof, rem) = divide_full(&spoly, &current, order);
        if rem.is_zero() {
            continue;
        }
        for (b, q) in cof.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for k in 0..n_input {
                let delta = q.mul(&basis[b].coeffs[k]).expect("same ring");
                coeffs[k] = coeffs[k].sub(&delta).expect("same ring");
            }
        }
        let lt = leading_term(&rem, order).unwrap();
        let new_index = basis.len();
        basis.push(Entry {
            poly: rem,
            lt,
            coeffs,
        });
        for k in 0..new_index {
            pairs.push((k, new_index));
        }
    }

    // Minimalize: drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            if basis[j].lt.0.divides(&basis[i].lt.0) && basis[j].lt.0 != basis[i].lt.0 {
                keep[i] = false;
                break;
            }
            if basis[j].lt.0 == basis[i].lt.0 && j < i {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<Entry> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect();

    // Tail-reduce each element against the others and normalize monic.
    for i in 0..kept.len() {
        let others: Vec<MultiPoly> = kept
            .iter()
            .enumerate()
            .filter_map(|(j, e)| (j != i).then(|| e.poly.clone()))
            .collect();
        let (cof, rem) = divide_full(&kept[i].poly, &others, order);
        let mut new_coeffs = kept[i].coeffs.clone();
        let mut oi = 0;
        for (j, e) in kept.iter().enumerate() {
            if j == i {
                continue;
            }
            let q = &cof[oi];
            oi += 1;
            if q.is_zero() {
                continue;
            }
            for k in 0..n_input {
                let delta = q.mul(&e.coeffs[k]).expect("same ring");
                new_coeffs[k] = new_coeffs[k].sub(&delta).expect("same ring");
            }
        }
        let lc = leading_term(&rem, order).unwrap().1;
        let inv = lc.recip();
        kept[i].poly = rem.scale(&inv);
        kept[i].lt = leading_term(&kept[i].poly, order).unwrap();
        kept[i].coeffs = new_coeffs.iter().map(|c| c.scale(&inv)).collect();
    }

    kept.sort_by(|a, b| order.cmp(&a.lt.0, &b.lt.0));

    GroebnerBasis {
        generators: kept.iter().map(|e| e.poly.clone()).collect(),
        order,
        trafo: kept.into_iter().map(|e| e.coeffs).collect(),
        input_len: n_input,
    }
}

/// Normal form of `p` modulo a Groebner basis, with the cofactors
/// `p = sum a_i g_i + remainder` over the basis generators.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub remainder: MultiPoly,
    pub cofactors: Vec<MultiPoly>,
}

pub fn normal_form(p: &MultiPoly, gb: &GroebnerBasis) -> NormalForm {
    let (cofactors, remainder) = divide_full(p, &gb.generators, gb.order);
    NormalForm {
        remainder,
        cofactors,
    }
}

/// The Milnor algebra of `f`: Groebner basis of the Jacobian ideal, the
/// standard monomial basis and mu.
#[derive(Debug, Clone)]
pub struct MilnorData {
    pub f: MultiPoly,
    pub partials: Vec<MultiPoly>,
    pub jacobian_gb: GroebnerBasis,
    pub standard_monomials: Vec<Monomial>,
    pub mu: usize,
}

pub fn milnor_data(f: &MultiPoly) -> Result<MilnorData> {
    milnor_data_with_order(f, MonomialOrder::GrevLex)
}

pub fn milnor_data_with_order(f: &MultiPoly, order: MonomialOrder) -> Result<MilnorData> {
    let n = f.nvars();
    let partials: Vec<MultiPoly> = (0..n).map(|i| f.partial(i)).collect::<Result<_>>()?;
    if partials.iter().all(|p| p.is_zero()) {
        return Err(Error::NonIsolatedCriticalLocus);
    }
    let gb = buchberger(&partials, order);
    if gb.contains_one() {
        // No critical points at all: the Milnor algebra is zero.
        return Ok(MilnorData {
            f: f.clone(),
            partials,
            jacobian_gb: gb,
            standard_monomials: Vec::new(),
            mu: 0,
        });
    }
    let lts = gb.leading_monomials();

    // Zero-dimensionality: every variable has a pure power among the leading terms.
    let mut axis_bound = vec![None::<u32>; n];
    for lm in &lts {
        let support: Vec<usize> = (0..n).filter(|&i| lm.0[i] > 0).collect();
        if support.len() == 1 {
            let i = support[0];
            let e = lm.0[i];
            axis_bound[i] = Some(axis_bound[i].map_or(e, |b| b.min(e)));
        }
    }
    let bounds: Vec<u32> = match axis_bound.iter().map(|b| b.ok_or(())).collect::<std::result::Result<Vec<_>, _>>() {
        Ok(b) => b,
        Err(()) => return Err(Error::NonIsolatedCriticalLocus),
    };

    // Standard monomials: the grid under the pure-power bounds minus the staircase.
    let mut standard = Vec::new();
    let mut stack = vec![0u32; n];
    enumerate_grid(&mut stack, 0, &bounds, &mut |exps| {
        let m = Monomial(exps.to_vec());
        if !lts.iter().any(|lm| lm.divides(&m)) {
            standard.push(m);
        }
    });
    standard.sort();
    let mu = standard.len();
    Ok(MilnorData {
        f: f.clone(),
        partials,
        jacobian_gb: gb,
        standard_monomials: standard,
        mu,
    })
}

fn enumerate_grid(stack: &mut Vec<u32>, i: usize, bounds: &[u32], visit: &mut impl FnMut(&[u32])) {
    if i == bounds.len() {
        visit(stack);
        return;
    }
    for e in 0..bounds[i] {
        stack[i] = e;
        enumerate_grid(stack, i + 1, bounds, visit);
    }
    stack[i] = 0;
}

impl MilnorData {
    /// Index of a standard monomial in the basis.
    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.standard_monomials.binary_search(m).ok()
    }

    /// Write `p = sum_b c_b b + sum_i a_i d_i f` with b the standard monomials
    /// and d_i f the Jacobian partials. Returns (c in basis order, a).
    pub fn reduce_to_partials(&self, p: &MultiPoly) -> (Vec<Rational>, Vec<MultiPoly>) {
        let nf = normal_form(p, &self.jacobian_gb);
        let n = self.f.nvars();
        let vars = &self.f.vars;
        let mut a = vec![MultiPoly::zero(vars); n];
        for (j, q) in nf.cofactors.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for i in 0..n {
                let delta = q.mul(&self.jacobian_gb.trafo[j][i]).expect("same ring");
                a[i] = a[i].add(&delta).expect("same ring");
            }
        }
        let mut coords = vec![Rational::zero(); self.mu];
        for (m, c) in nf.remainder.terms() {
            let idx = self
                .basis_index(m)
                .expect("normal form is supported on standard monomials");
            coords[idx] = c.clone();
        }
        (coords, a)
    }

    /// Normal-form coordinates of `p` in the standard monomial basis.
    pub fn nf_coords(&self, p: &MultiPoly) -> Vec<Rational> {
        self.reduce_to_partials(p).0
    }
}

/// True iff the generators have a common zero with all coordinates nonzero.
///
/// Adjoins an auxiliary variable z with the relation z * x_0...x_n - 1 and
/// tests whether 1 lies in the enlarged ideal.
pub fn has_torus_zero(gens: &[MultiPoly]) -> bool {
    let nonzero: Vec<&MultiPoly> = gens.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        // Zero ideal: every torus point is a common zero.
        return true;
    };
    if nonzero.iter().any(|g| g.is_constant()) {
        return false;
    }
    let vars = &first.vars;
    let n = vars.len();
    let mut aux = "z".to_string();
    while vars.contains(&aux) {
        aux.push('_');
    }
    let mut ext_vars = vars.clone();
    ext_vars.push(aux);

    let lift = |p: &MultiPoly| -> MultiPoly {
        let mut out = MultiPoly::zero(&ext_vars);
        for (m, c) in p.terms() {
            let mut exps = m.0.clone();
            exps.push(0);
            out.insert_term(Monomial(exps), c.clone());
        }
        out
    };

    let mut ext_gens: Vec<MultiPoly> = nonzero.iter().map(|g| lift(g)).collect();
    // z * x_0 ... x_n - 1
    let mut exps = vec![1u32; n + 1];
    exps[n] = 1;
    let mut rel = MultiPoly::zero(&ext_vars);
    rel.insert_term(Monomial(exps), Rational::one());
    rel.insert_term(Monomial::one(n + 1), -Rational::one());
    ext_gens.push(rel);

    let gb = buchberger(&ext_gens, MonomialOrder::GrevLex);
    !gb.contains_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, rat_int};
    use crate::poly::{parse, var_list};
    use proptest::prelude::*;

    fn xy() -> Vec<String> {
        var_list(&["x", "y"])
    }

    fn p(s: &str) -> MultiPoly {
        parse(s, &xy()).unwrap()
    }

    #[test]
    fn buchberger_examples() {
        // (3x^2, 3y^2) -> {x^2, y^2} (listed ascending in grevlex: y^2 first)
        let gb = buchberger(&[p("3x^2"), p("3y^2")], MonomialOrder::GrevLex);
        assert_eq!(gb.generators, vec![p("y^2"), p("x^2")]);

        // (x^2 - 1, y) -> itself (S-polynomial reduces to 0)
        let gb = buchberger(&[p("x^2 - 1"), p("y")], MonomialOrder::GrevLex);
        assert_eq!(gb.generators, vec![p("y"), p("x^2 - 1")]);

        // (x, x) -> {x}
        let gb = buchberger(&[p("x"), p("x")], MonomialOrder::GrevLex);
        assert_eq!(gb.generators, vec![p("x")]);
    }

    #[test]
    fn buchberger_trafo_identity() {
        let gens = [p("x^2 + y"), p("x*y - 1"), p("y^3 + x")];
        let gb = buchberger(&gens, MonomialOrder::GrevLex);
        for (j, g) in gb.generators.iter().enumerate() {
            let mut acc = MultiPoly::zero(&xy());
            for (i, gen) in gens.iter().enumerate() {
                acc = acc.add(&gb.trafo[j][i].mul(gen).unwrap()).unwrap();
            }
            assert_eq!(&acc, g, "trafo identity for basis element {j}");
        }
        // All S-polynomials reduce to zero: normal form of each generator is 0.
        for gen in &gens {
            assert!(normal_form(gen, &gb).remainder.is_zero());
        }
    }

    #[test]
    fn normal_form_examples() {
        let gb = buchberger(&[p("x^2 - 1"), p("y")], MonomialOrder::GrevLex);
        let nf = normal_form(&p("x^4"), &gb);
        assert_eq!(nf.remainder, p("1"));
        // cofactor identity
        let mut acc = nf.remainder.clone();
        for (a, g) in nf.cofactors.iter().zip(&gb.generators) {
            acc = acc.add(&a.mul(g).unwrap()).unwrap();
        }
        assert_eq!(acc, p("x^4"));

        let gb2 = buchberger(&[p("3x^2"), p("3y^2")], MonomialOrder::GrevLex);
        assert!(normal_form(&p("x^3 + y^3"), &gb2).remainder.is_zero());
        assert_eq!(normal_form(&p("x*y"), &gb2).remainder, p("x*y"));
    }

    #[test]
    fn milnor_examples() {
        // f = x^3 + y^3: mu = 4, basis {1, x, y, x y} (grevlex ascending: 1, y, x, xy)
        let md = milnor_data(&p("x^3 + y^3")).unwrap();
        assert_eq!(md.mu, 4);
        let rendered: Vec<String> = md
            .standard_monomials
            .iter()
            .map(|m| MultiPoly::monomial_term(&xy(), m.clone(), rat_int(1)).render())
            .collect();
        assert_eq!(rendered, vec!["1", "y", "x", "x*y"]);

        // f = 1/3 x^3 - x + 1/2 y^2: mu = 2, basis {1, x}
        let md = milnor_data(&p("1/3x^3 - x + 1/2y^2")).unwrap();
        assert_eq!(md.mu, 2);
        let rendered: Vec<String> = md
            .standard_monomials
            .iter()
            .map(|m| MultiPoly::monomial_term(&xy(), m.clone(), rat_int(1)).render())
            .collect();
        assert_eq!(rendered, vec!["1", "x"]);

        // f = x^2 + y^2: mu = 1
        let md = milnor_data(&p("x^2 + y^2")).unwrap();
        assert_eq!(md.mu, 1);

        // non-isolated: f = x^2 (in two variables) has Jacobian (2x, 0)
        assert!(matches!(
            milnor_data(&p("x^2")),
            Err(Error::NonIsolatedCriticalLocus)
        ));
    }

    #[test]
    fn reduce_to_partials_identity() {
        let f = p("1/3x^3 - x + 1/2y^2");
        let md = milnor_data(&f).unwrap();
        let probe = p("x^4 + 2x*y - 3");
        let (coords, a) = md.reduce_to_partials(&probe);
        let mut acc = MultiPoly::zero(&xy());
        for (c, m) in coords.iter().zip(&md.standard_monomials) {
            acc = acc
                .add(&MultiPoly::monomial_term(&xy(), m.clone(), c.clone()))
                .unwrap();
        }
        for (ai, di) in a.iter().zip(&md.partials) {
            acc = acc.add(&ai.mul(di).unwrap()).unwrap();
        }
        assert_eq!(acc, probe);
    }

    #[test]
    fn torus_zero_examples() {
        assert!(!has_torus_zero(&[p("x"), p("y")]));
        assert!(has_torus_zero(&[p("x - 1"), p("y - 1")]));
        assert!(has_torus_zero(&[p("x + y")]));
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec(((0u32..4, 0u32..4), -4i64..=4), 0..5).prop_map(|terms| {
            let mut q = MultiPoly::zero(&xy());
            for ((a, b), c) in terms {
                q.insert_term(crate::poly::Monomial(vec![a, b]), rat_int(c));
            }
            q
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // normal_form is idempotent and Q-linear; cofactor identity exact.
        #[test]
        fn nf_properties(q in arb_poly(), r in arb_poly(), c in -3i64..=3) {
            let gb = buchberger(&[p("x^2 - 1"), p("y^2 + x")], MonomialOrder::GrevLex);
            let nf_q = normal_form(&q, &gb);
            let nf_nf = normal_form(&nf_q.remainder, &gb);
            prop_assert_eq!(&nf_nf.remainder, &nf_q.remainder);

            let combo = q.scale(&rat(c, 1)).add(&r).unwrap();
            let nf_combo = normal_form(&combo, &gb);
            let expect = nf_q.remainder.scale(&rat(c, 1))
                .add(&normal_form(&r, &gb).remainder).unwrap();
            prop_assert_eq!(&nf_combo.remainder, &expect);

            let mut acc = nf_combo.remainder.clone();
            for (a, g) in nf_combo.cofactors.iter().zip(&gb.generators) {
                acc = acc.add(&a.mul(g).unwrap()).unwrap();
            }
            prop_assert_eq!(acc, combo);
        }
    }
}
