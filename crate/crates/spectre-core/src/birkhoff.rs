//! The Riemann-Hilbert-Birkhoff problem for a lattice pair: bases in which
//! the matrix of t is A_0 + theta A_1, and good bases where additionally the
//! eigenvalue multiset of A_1 equals the spectrum.

use crate::brieskorn::LatticePair;
use crate::error::{Error, Result};
use crate::exactalg::matrix::{
    char_poly, in_row_span, reduce_mod_rows, row_space_basis, QMatrix,
};
use crate::exactalg::rational::Rational;
use crate::exactalg::theta::{ThetaMatrix, ThetaPoly};
use crate::exactalg::unipoly::{rational_root_factor, UniPoly};
use crate::lattice::{ClassData, SpectrumMultiset, VFiltration};
use num::{One, Zero};
use serde::Serialize;

/// For one class alpha: the increasing chain G_k gr_alpha^V and the nilpotent
/// N = -(tau d_tau + alpha) acting on gr_alpha^V.
#[derive(Debug, Clone)]
pub struct ClassGrFiltration {
    pub alpha: Rational,
    pub gr_dim: usize,
    pub nilpotent: QMatrix,
    /// (k, RREF basis of G_k gr_alpha in gr coordinates), k ascending.
    pub levels: Vec<(i64, Vec<Vec<Rational>>)>,
    /// Levels k where the chain jumps, with the jump sizes.
    pub jump_levels: Vec<(i64, usize)>,
}

#[derive(Debug, Clone)]
pub struct InducedGrFiltration {
    pub mu: usize,
    pub classes: Vec<ClassGrFiltration>,
}

/// The filtration induced by G_k on each gr_alpha^V, read off the V-filtration data.
pub fn induced_gr_filtration(lp: &LatticePair, vf: &VFiltration) -> Result<InducedGrFiltration> {
    let mut classes = Vec::new();
    let mut total = 0usize;
    for class in &vf.classes {
        let mut levels: Vec<(i64, Vec<Vec<Rational>>)> = class
            .levels
            .iter()
            .map(|l| (l.k, l.gr_subspace.clone()))
            .collect();
        levels.sort_by_key(|(k, _)| *k);
        let mut jump_levels = Vec::new();
        let mut prev = 0usize;
        for (k, sub) in &levels {
            if sub.len() > prev {
                jump_levels.push((*k, sub.len() - prev));
                prev = sub.len();
            }
        }
        if prev != class.gr_dim() {
            return Err(Error::Inconsistency(format!(
                "induced filtration on gr_{} reaches {} of {}",
                class.alpha,
                prev,
                class.gr_dim()
            )));
        }
        total += prev;
        classes.push(ClassGrFiltration {
            alpha: class.alpha.clone(),
            gr_dim: class.gr_dim(),
            nilpotent: class.nilpotent.clone(),
            levels,
            jump_levels,
        });
    }
    if total != lp.mu {
        return Err(Error::Inconsistency(format!(
            "graded dimensions sum to {total}, expected mu = {}",
            lp.mu
        )));
    }
    Ok(InducedGrFiltration {
        mu: lp.mu,
        classes,
    })
}

/// Decreasing filtrations H_alpha opposite to the induced increasing ones,
/// stored through their splitting grading U_k (H^k = sum of U_j for j >= k).
#[derive(Debug, Clone)]
pub struct OppositeFiltration {
    pub classes: Vec<ClassOpposite>,
}

#[derive(Debug, Clone)]
pub struct ClassOpposite {
    pub alpha: Rational,
    /// (k, basis of U_k in gr coordinates), k ascending; dim U_k = jump of G_. at k.
    pub grading: Vec<(i64, Vec<Vec<Rational>>)>,
}

/// Complement of `inside` within `space` (both RREF row bases), preferring the
/// earliest vectors of `space`.
fn complement_in(space: &[Vec<Rational>], inside: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    let mut span: Vec<Vec<Rational>> = inside.to_vec();
    for v in space {
        let basis = row_space_basis(&span, dim);
        let red = reduce_mod_rows(&basis, v);
        if red.iter().any(|c| !c.is_zero()) {
            chosen.push(v.clone());
            span.push(v.clone());
        }
    }
    chosen
}

/// Search for N-stable opposite filtrations.
///
/// Strategy (a): one jump level per class makes the choice unique. Otherwise
/// complements are corrected level by level (descending) with exact linear
/// solves; the search is a heuristic and reports the obstruction on failure.
pub fn find_opposite_filtration(igf: &InducedGrFiltration) -> Result<OppositeFiltration> {
    let mut classes = Vec::new();
    for class in &igf.classes {
        let dim = class.gr_dim;
        let n = &class.nilpotent;
        let full: Vec<Vec<Rational>> = (0..dim)
            .map(|i| {
                let mut v = vec![Rational::zero(); dim];
                v[i] = Rational::one();
                v
            })
            .collect();

        let mut grading: Vec<(i64, Vec<Vec<Rational>>)> = Vec::new();
        if class.jump_levels.len() == 1 {
            // Unique choice: the whole graded piece sits at one level.
            let (k, _) = class.jump_levels[0];
            grading.push((k, full));
        } else {
            // Descending induction with linear correction rounds.
            let mut h_next: Vec<Vec<Rational>> = Vec::new(); // RREF of H^{k+1}
            for idx in (0..class.jump_levels.len()).rev() {
                let (k, _) = class.jump_levels[idx];
                let level_sub = |kk: i64| -> Vec<Vec<Rational>> {
                    class
                        .levels
                        .iter()
                        .rev()
                        .find(|(lk, _)| *lk <= kk)
                        .map(|(_, s)| s.clone())
                        .unwrap_or_default()
                };
                let f_k = level_sub(k);
                let f_prev = level_sub(k - 1);
                let mut u_k = complement_in(&f_k, &f_prev, dim);
                // Correction rounds: move u into u + w, w in F_{k-1}, so that
                // N(u) lands in span(U_k, H^{k+1}).
                let f_prev_basis = row_space_basis(&f_prev, dim);
                let mut ok = false;
                for _round in 0..dim + 2 {
                    let mut span_rows = u_k.clone();
                    span_rows.extend(h_next.iter().cloned());
                    let span = row_space_basis(&span_rows, dim);
                    let residuals: Vec<Vec<Rational>> = u_k
                        .iter()
                        .map(|u| reduce_mod_rows(&span, &n.mul_vec(u)))
                        .collect();
                    if residuals
                        .iter()
                        .all(|r| r.iter().all(|c| c.is_zero()))
                    {
                        ok = true;
                        break;
                    }
                    // Solve N w = -residual modulo span, w in F_{k-1}.
                    let mut fixed = false;
                    for (u, res) in u_k.iter_mut().zip(&residuals) {
                        if res.iter().all(|c| c.is_zero()) {
                            continue;
                        }
                        let cols: Vec<Vec<Rational>> = f_prev_basis
                            .iter()
                            .map(|w| reduce_mod_rows(&span, &n.mul_vec(w)))
                            .collect();
                        if cols.is_empty() {
                            continue;
                        }
                        let solver = QMatrix::from_rows(cols).transpose();
                        let target: Vec<Rational> = res.iter().map(|c| -c.clone()).collect();
                        if let Some(coeffs) = solver.solve(&target) {
                            for (c, w) in coeffs.iter().zip(&f_prev_basis) {
                                if c.is_zero() {
                                    continue;
                                }
                                for (ui, wi) in u.iter_mut().zip(w) {
                                    *ui = &*ui + c * wi;
                                }
                            }
                            fixed = true;
                        }
                    }
                    if !fixed {
                        break;
                    }
                }
                if !ok {
                    // Final state check once more before giving up.
                    let mut span_rows = u_k.clone();
                    span_rows.extend(h_next.iter().cloned());
                    let span = row_space_basis(&span_rows, dim);
                    let stable = u_k
                        .iter()
                        .all(|u| in_row_span(&span, &n.mul_vec(u)));
                    if !stable {
                        return Err(Error::NoOppositeFiltration {
                            alpha: class.alpha.to_string(),
                            level: k,
                        });
                    }
                }
                let mut h_rows = u_k.clone();
                h_rows.extend(h_next.iter().cloned());
                h_next = row_space_basis(&h_rows, dim);
                grading.push((k, u_k));
            }
            grading.reverse();
        }
        classes.push(ClassOpposite {
            alpha: class.alpha.clone(),
            grading,
        });
    }
    let of = OppositeFiltration { classes };
    verify_opposite(igf, &of)?;
    Ok(of)
}

/// Both conditions of the opposite-filtration contract, verified exactly:
/// N-stability of every H^k and oppositeness (U_k complements G_{k-1} in G_k).
fn verify_opposite(igf: &InducedGrFiltration, of: &OppositeFiltration) -> Result<()> {
    for (class, opp) in igf.classes.iter().zip(&of.classes) {
        let dim = class.gr_dim;
        let n = &class.nilpotent;
        // N-stability of tails.
        let mut tail: Vec<Vec<Rational>> = Vec::new();
        for (k, u) in opp.grading.iter().rev() {
            tail.extend(u.iter().cloned());
            let span = row_space_basis(&tail, dim);
            for v in &span {
                if !in_row_span(&span, &n.mul_vec(v)) {
                    return Err(Error::NoOppositeFiltration {
                        alpha: class.alpha.to_string(),
                        level: *k,
                    });
                }
            }
        }
        // Oppositeness: splitting of the increasing chain.
        let level_sub = |kk: i64| -> Vec<Vec<Rational>> {
            class
                .levels
                .iter()
                .rev()
                .find(|(lk, _)| *lk <= kk)
                .map(|(_, s)| s.clone())
                .unwrap_or_default()
        };
        for (k, u) in &opp.grading {
            let f_k = level_sub(*k);
            let f_prev = row_space_basis(&level_sub(*k - 1), dim);
            let mut span_rows = f_prev.clone();
            span_rows.extend(u.iter().cloned());
            let combined = row_space_basis(&span_rows, dim);
            if combined.len() != f_prev.len() + u.len() || combined.len() != f_k.len() {
                return Err(Error::NoOppositeFiltration {
                    alpha: class.alpha.to_string(),
                    level: *k,
                });
            }
            for v in u {
                if !in_row_span(&f_k, v) {
                    return Err(Error::NoOppositeFiltration {
                        alpha: class.alpha.to_string(),
                        level: *k,
                    });
                }
            }
        }
    }
    Ok(())
}

/// A solved Birkhoff problem: unimodular gauge P from the original basis,
/// the constant pencil A_0 + theta A_1, and the verification inputs.
#[derive(Debug, Clone)]
pub struct GoodBasisResult {
    pub gauge: ThetaMatrix,
    pub a0: QMatrix,
    pub a1: QMatrix,
    pub very_good: bool,
    /// t-matrix in the new basis (degree <= 1 unless stalled).
    pub new_t: ThetaMatrix,
    /// t-matrix in the original basis, kept for independent re-derivation.
    pub base_t: ThetaMatrix,
    /// Some(degree) when the gauge-reduction loop stalled above degree 1.
    pub stalled: Option<usize>,
}

/// Lift one graded basis vector v of U_k (gr coordinates) to an element of
/// V_alpha cap G_k with class v, by windowed affine linear algebra.
fn lift_gr_vector(
    class: &ClassData,
    k: i64,
    v_gr: &[Rational],
) -> Result<crate::lattice::laurent::LaurentVec> {
    use crate::lattice::laurent as lr;
    let mu = class.lattice.mu;
    let basis = class.lattice.basis();
    let min_ord = basis.iter().filter_map(lr::vec_min_ord).min().unwrap_or(0);
    let max_ord = basis.iter().filter_map(lr::vec_max_ord).max().unwrap_or(0);
    let hard_cap = 4 * mu + 2 * (min_ord.unsigned_abs().max(max_ord.unsigned_abs()) as usize) + 4;
    let gr_dim = class.gr_dim();

    let mut prev_null: Vec<usize> = Vec::new();
    let mut d = 1usize;
    loop {
        let cols = mu * (d + 1);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let mut rhs: Vec<Rational> = Vec::new();
        // Membership in G_k: theta-coefficients below -k vanish.
        let lo = min_ord - d as i64;
        for coord in 0..mu {
            for m in lo..(-k) {
                let mut row = vec![Rational::zero(); cols];
                let mut nonzero = false;
                for c in 0..mu {
                    for j in 0..=d {
                        let v = basis[c][coord].coeff(m + j as i64);
                        if !v.is_zero() {
                            nonzero = true;
                        }
                        row[c * (d + 1) + j] = v;
                    }
                }
                if nonzero {
                    rows.push(row);
                    rhs.push(Rational::zero());
                }
            }
        }
        // Class condition: projector . p(0) = v_gr.
        for e in 0..gr_dim {
            let mut row = vec![Rational::zero(); cols];
            for c in 0..mu {
                row[c * (d + 1)] = class.projector[(e, c)].clone();
            }
            rows.push(row);
            rhs.push(v_gr[e].clone());
        }
        let mat = QMatrix::from_rows(rows);
        let solution = mat.solve(&rhs);
        let null_dim = mat.null_space().len();
        prev_null.push(null_dim);
        let n = prev_null.len();
        let stable = n >= 3
            && prev_null[n - 1] == prev_null[n - 2]
            && prev_null[n - 2] == prev_null[n - 3];
        if let (Some(sol), true) = (&solution, stable) {
            let mut x = lr::vec_zero(mu);
            for (c, w) in basis.iter().enumerate() {
                for j in 0..=d {
                    let coeff = &sol[c * (d + 1) + j];
                    if coeff.is_zero() {
                        continue;
                    }
                    let term = lr::vec_shift(&lr::vec_scale(w, coeff), -(j as i64));
                    x = lr::vec_add(&x, &term);
                }
            }
            return Ok(x);
        }
        d += 1;
        if d > hard_cap {
            return Err(Error::Inconsistency(format!(
                "no lift found for a graded vector at level {k} within the degree cap"
            )));
        }
    }
}

/// Construct a good-basis candidate from the opposite filtration and reduce
/// the t-matrix to a constant pencil A_0 + theta A_1 by exact gauges.
pub fn construct_good_basis(
    lp: &LatticePair,
    vf: &VFiltration,
    of: &OppositeFiltration,
) -> Result<GoodBasisResult> {
    let mu = lp.mu;
    if mu == 0 {
        return Ok(GoodBasisResult {
            gauge: ThetaMatrix::identity(0),
            a0: QMatrix::zero(0, 0),
            a1: QMatrix::zero(0, 0),
            very_good: true,
            new_t: ThetaMatrix::zero(0),
            base_t: lp.t_matrix.clone(),
            stalled: None,
        });
    }

    // Lift every graded vector and collect (beta, theta-coordinates).
    struct Candidate {
        beta: Rational,
        coords: Vec<ThetaPoly>,
        pivot: usize,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for opp in &of.classes {
        let class = vf
            .classes
            .iter()
            .find(|c| c.alpha == opp.alpha)
            .expect("opposite filtration matches V-filtration classes");
        for (k, u_vectors) in &opp.grading {
            for v in u_vectors {
                let x = lift_gr_vector(class, *k, v)?;
                let y = crate::lattice::laurent::vec_shift(&x, *k);
                let mut coords = Vec::with_capacity(mu);
                for entry in &y {
                    let p = laurent_to_theta_poly(entry).ok_or_else(|| {
                        Error::Inconsistency("lifted basis element is not in G_0".into())
                    })?;
                    coords.push(p);
                }
                let pivot = coords
                    .iter()
                    .position(|p| !p.coeff(0).is_zero())
                    .unwrap_or(mu);
                // Canonical scaling: first nonzero theta^0 coordinate becomes 1.
                if pivot < mu {
                    let scale = coords[pivot].coeff(0).recip();
                    if !scale.is_one() {
                        coords = coords.iter().map(|p| p.scale(&scale)).collect();
                    }
                }
                candidates.push(Candidate {
                    beta: &class.alpha + Rational::from_integer((*k).into()),
                    coords,
                    pivot,
                });
            }
        }
    }
    if candidates.len() != mu {
        return Err(Error::Inconsistency(format!(
            "good-basis candidate has {} elements, expected {}",
            candidates.len(),
            mu
        )));
    }
    candidates.sort_by(|a, b| a.beta.cmp(&b.beta).then(a.pivot.cmp(&b.pivot)));
    let betas: Vec<Rational> = candidates.iter().map(|c| c.beta.clone()).collect();

    let gauge = ThetaMatrix::from_fn(mu, |i, j| candidates[i].coords[j].clone());
    let p_inv = gauge.inverse().map_err(|e| match e {
        Error::NotUnimodular { det } => Error::Inconsistency(format!(
            "good-basis candidate does not span G_0 (det = {det})"
        )),
        other => other,
    })?;
    // t-matrix in the new basis: theta^2 P' P^{-1} + P A P^{-1}.
    let mut b = gauge
        .theta2_ddtheta()
        .add(&gauge.mul(&lp.t_matrix))
        .mul(&p_inv);
    let mut p_total = gauge;

    // Gauge-reduction loop: kill the lowest theta-degree >= 2 with
    // filtration-compatible (hence nilpotent, unimodular) corrections.
    let mut iterations = 0usize;
    let cap = 25 + 4 * mu + 4 * b.deg().max(0) as usize;
    let mut stalled = None;
    while b.deg() > 1 {
        iterations += 1;
        if iterations > cap {
            stalled = Some(b.deg().max(0) as usize);
            break;
        }
        let k = (2..=b.deg().max(2) as usize)
            .find(|&j| !b.coeff_matrix(j).is_zero())
            .expect("degree > 1 means some coefficient >= 2 is nonzero");
        match solve_gauge_step(&b, &betas, k) {
            Some(c) => {
                let m = k - 1;
                let mut p2 = ThetaMatrix::identity(mu);
                for i in 0..mu {
                    for j in 0..mu {
                        if c[(i, j)].is_zero() {
                            continue;
                        }
                        let cur = p2
                            .get(i, j)
                            .add(&UniPoly::monomial(c[(i, j)].clone(), m));
                        p2.set(i, j, cur);
                    }
                }
                let p2_inv = p2.inverse()?;
                b = p2.theta2_ddtheta().add(&p2.mul(&b)).mul(&p2_inv);
                p_total = p2.mul(&p_total);
            }
            None => {
                stalled = Some(b.deg().max(0) as usize);
                break;
            }
        }
    }

    let a0 = b.coeff_matrix(0);
    let a1 = b.coeff_matrix(1);
    let very_good = stalled.is_none() && is_semisimple(&a1)?;
    Ok(GoodBasisResult {
        gauge: p_total,
        a0,
        a1,
        very_good,
        new_t: b,
        base_t: lp.t_matrix.clone(),
        stalled,
    })
}

fn laurent_to_theta_poly(p: &crate::lattice::laurent::LaurentPoly) -> Option<ThetaPoly> {
    if p.is_zero() {
        return Some(UniPoly::zero());
    }
    let lo = p.min_ord()?;
    if lo < 0 {
        return None;
    }
    let hi = p.max_ord()?;
    let coeffs: Vec<Rational> = (0..=hi).map(|k| p.coeff(k)).collect();
    let _ = lo;
    Some(UniPoly::new(coeffs))
}

/// Solve for C in the gauge I + theta^{k-1} C killing the theta^k coefficient:
/// ((k-1) I + ad_{B_1}) C = -B_k, with [C, B_0] = 0 when k >= 3, and
/// C[i][j] = 0 unless beta_i - beta_j >= k - 1 (filtration compatibility).
fn solve_gauge_step(b: &ThetaMatrix, betas: &[Rational], k: usize) -> Option<QMatrix> {
    let mu = b.size;
    let b0 = b.coeff_matrix(0);
    let b1 = b.coeff_matrix(1);
    let bk = b.coeff_matrix(k);
    let m = k - 1;
    let m_rat = Rational::from_integer((m as i64).into());

    // Allowed unknown positions.
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for i in 0..mu {
        for j in 0..mu {
            if &betas[i] - &betas[j] >= m_rat {
                slots.push((i, j));
            }
        }
    }
    if slots.is_empty() {
        return if bk.is_zero() { Some(QMatrix::zero(mu, mu)) } else { None };
    }
    let slot_index = |i: usize, j: usize| slots.iter().position(|&(a, c)| (a, c) == (i, j));

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    // Cancellation: (m C + C B1 - B1 C)[i][j] = -Bk[i][j] for all i, j.
    for i in 0..mu {
        for j in 0..mu {
            let mut row = vec![Rational::zero(); slots.len()];
            if let Some(s) = slot_index(i, j) {
                row[s] += &m_rat;
            }
            for l in 0..mu {
                if let Some(s) = slot_index(i, l) {
                    row[s] += &b1[(l, j)];
                }
                if let Some(s) = slot_index(l, j) {
                    row[s] -= &b1[(i, l)];
                }
            }
            rows.push(row);
            rhs.push(-bk[(i, j)].clone());
        }
    }
    // Commutation with B0 for k >= 3 (keeps the already-clean theta^{k-1} slot).
    if k >= 3 {
        for i in 0..mu {
            for j in 0..mu {
                let mut row = vec![Rational::zero(); slots.len()];
                let mut any = false;
                for l in 0..mu {
                    if let Some(s) = slot_index(i, l) {
                        row[s] += &b0[(l, j)];
                        any = true;
                    }
                    if let Some(s) = slot_index(l, j) {
                        row[s] -= &b0[(i, l)];
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                    rhs.push(Rational::zero());
                }
            }
        }
    }
    let sol = QMatrix::from_rows(rows).solve(&rhs)?;
    let mut c = QMatrix::zero(mu, mu);
    for (s, (i, j)) in slots.iter().enumerate() {
        c[(*i, *j)] = sol[s].clone();
    }
    Some(c)
}

/// A_1 semisimple iff its squarefree characteristic part annihilates it.
fn is_semisimple(a1: &QMatrix) -> Result<bool> {
    let n = a1.rows;
    if n == 0 {
        return Ok(true);
    }
    let cp = char_poly(a1)?;
    let radical = cp.squarefree_part();
    let mut acc = QMatrix::zero(n, n);
    for k in (0..radical.coeffs().len()).rev() {
        acc = acc.mul(a1);
        for i in 0..n {
            acc[(i, i)] += &radical.coeffs()[k];
        }
    }
    Ok(acc.is_zero())
}

/// Verification report for a good-basis result against a reference spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct GoodBasisReport {
    pub degree_ok: bool,
    pub offending_degree: Option<usize>,
    pub gauge_unimodular: bool,
    pub gauge_sound: bool,
    pub eigenvalues_match_spectrum: bool,
    pub trace_matches: bool,
    pub very_good: bool,
    pub all_ok: bool,
}

/// Re-derive everything checkable about a GoodBasisResult: matrix degree,
/// gauge soundness (new = theta^2 P' P^{-1} + P old P^{-1}), eigenvalue
/// multiset of A_1 against the spectrum, and the trace identity.
pub fn verify_good_basis(r: &GoodBasisResult, s: &SpectrumMultiset) -> GoodBasisReport {
    let degree = r.new_t.deg();
    let degree_ok = degree <= 1;
    let offending_degree = if degree_ok { None } else { Some(degree as usize) };

    let det = r.gauge.det();
    let gauge_unimodular = !det.is_zero() && det.is_constant();
    let gauge_sound = match r.gauge.inverse() {
        Ok(p_inv) => {
            let rederived = r
                .gauge
                .theta2_ddtheta()
                .add(&r.gauge.mul(&r.base_t))
                .mul(&p_inv);
            rederived == r.new_t
        }
        Err(_) => false,
    };

    let eigenvalues_match_spectrum = match char_poly(&r.a1) {
        Ok(cp) => match rational_root_factor(&cp) {
            Ok((roots, rest)) => {
                rest.is_constant() && {
                    let mut found = SpectrumMultiset::empty();
                    for (root, mult) in roots {
                        found.insert(root, mult as u64);
                    }
                    &found == s
                }
            }
            Err(_) => false,
        },
        Err(_) => false,
    };

    let expected_trace: Rational = s
        .iter()
        .map(|(beta, &m)| beta * Rational::from_integer((m as i64).into()))
        .sum();
    let trace_matches = r.a1.trace() == expected_trace;

    let very_good = degree_ok && is_semisimple(&r.a1).unwrap_or(false);
    let all_ok = degree_ok
        && gauge_unimodular
        && gauge_sound
        && eigenvalues_match_spectrum
        && trace_matches;
    GoodBasisReport {
        degree_ok,
        offending_degree,
        gauge_unimodular,
        gauge_sound,
        eigenvalues_match_spectrum,
        trace_matches,
        very_good,
        all_ok,
    }
}

/// Full pipeline: V-filtration, induced filtration, opposite filtration,
/// good basis.
pub fn good_basis(lp: &LatticePair) -> Result<(VFiltration, GoodBasisResult)> {
    let vf = crate::lattice::v_filtration(lp)?;
    let igf = induced_gr_filtration(lp, &vf)?;
    let of = find_opposite_filtration(&igf)?;
    let gb = construct_good_basis(lp, &vf, &of)?;
    Ok((vf, gb))
}

/// JSON form of a good-basis result (gauge as theta-coefficient arrays,
/// matrices as rational grids).
pub fn good_basis_to_json(r: &GoodBasisResult) -> serde_json::Value {
    let mu = r.new_t.size;
    let render = crate::exactalg::rational::render_rational;
    let p: Vec<Vec<Vec<String>>> = (0..mu)
        .map(|i| {
            (0..mu)
                .map(|j| r.gauge.get(i, j).coeffs().iter().map(render).collect())
                .collect()
        })
        .collect();
    let grid = |m: &QMatrix| -> Vec<Vec<String>> {
        (0..m.rows)
            .map(|i| (0..m.cols).map(|j| render(&m[(i, j)])).collect())
            .collect()
    };
    serde_json::json!({
        "p": p,
        "a0": grid(&r.a0),
        "a1": grid(&r.a1),
        "very_good": r.very_good,
        "t_matrix_degree": r.new_t.deg(),
        "stalled": r.stalled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brieskorn::{t_matrix, twist};
    use crate::exactalg::rational::{rat, rat_int};
    use crate::lattice::v_filtration;
    use crate::poly::{parse, var_list};

    fn pxy(s: &str) -> crate::poly::MultiPoly {
        parse(s, &var_list(&["x", "y"])).unwrap()
    }

    #[test]
    fn induced_filtration_examples() {
        // x^3 + y^3: at alpha = 2/3 the chain jumps once at k = 0.
        let lp = t_matrix(&pxy("x^3 + y^3")).unwrap();
        let vf = v_filtration(&lp).unwrap();
        let igf = induced_gr_filtration(&lp, &vf).unwrap();
        let class = igf
            .classes
            .iter()
            .find(|c| c.alpha == rat(2, 3))
            .expect("class 2/3 exists");
        assert_eq!(class.jump_levels, vec![(0, 1)]);

        // 1/3x^3 - x + 1/2y^2: at alpha = 5/6, single jump at k = 0.
        let lp = t_matrix(&pxy("1/3x^3 - x + 1/2y^2")).unwrap();
        let vf = v_filtration(&lp).unwrap();
        let igf = induced_gr_filtration(&lp, &vf).unwrap();
        let class = igf
            .classes
            .iter()
            .find(|c| c.alpha == rat(5, 6))
            .expect("class 5/6 exists");
        assert_eq!(class.jump_levels, vec![(0, 1)]);

        // dimension count
        let total: usize = igf
            .classes
            .iter()
            .map(|c| c.jump_levels.iter().map(|(_, d)| d).sum::<usize>())
            .sum();
        assert_eq!(total, lp.mu);
    }

    #[test]
    fn good_basis_quasi_homogeneous() {
        // x^3 + y^3: P = I, A0 = 0, A1 = diag(2/3, 1, 1, 4/3), very good.
        let lp = t_matrix(&pxy("x^3 + y^3")).unwrap();
        let (vf, gb) = good_basis(&lp).unwrap();
        assert!(gb.stalled.is_none());
        assert_eq!(gb.gauge, ThetaMatrix::identity(4));
        assert!(gb.a0.is_zero());
        let expect = [rat(2, 3), rat_int(1), rat_int(1), rat(4, 3)];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expect[i].clone() } else { rat_int(0) };
                assert_eq!(gb.a1[(i, j)], want);
            }
        }
        assert!(gb.very_good);
        let report = verify_good_basis(&gb, &vf.spectrum);
        assert!(report.all_ok, "{report:?}");
    }

    #[test]
    fn good_basis_distinct_critical_values() {
        // 1/3x^3 - x + 1/2y^2: P = I, A0 = [[0,-2/3],[-2/3,0]], A1 = diag(5/6, 7/6).
        let lp = t_matrix(&pxy("1/3x^3 - x + 1/2y^2")).unwrap();
        let (vf, gb) = good_basis(&lp).unwrap();
        assert_eq!(gb.gauge, ThetaMatrix::identity(2));
        assert_eq!(gb.a0[(0, 1)], rat(-2, 3));
        assert_eq!(gb.a0[(1, 0)], rat(-2, 3));
        assert_eq!(gb.a1[(0, 0)], rat(5, 6));
        assert_eq!(gb.a1[(1, 1)], rat(7, 6));
        assert!(gb.very_good);
        assert!(verify_good_basis(&gb, &vf.spectrum).all_ok);
    }

    #[test]
    fn good_basis_shifted_quadric() {
        // x^2 + y^2 + 1: A0 = (1), A1 = (1).
        let lp = t_matrix(&pxy("x^2 + y^2 + 1")).unwrap();
        let (vf, gb) = good_basis(&lp).unwrap();
        assert_eq!(gb.a0[(0, 0)], rat_int(1));
        assert_eq!(gb.a1[(0, 0)], rat_int(1));
        assert!(verify_good_basis(&gb, &vf.spectrum).all_ok);
    }

    #[test]
    fn twist_preserves_a1() {
        let lp = t_matrix(&pxy("1/3x^3 - x + 1/2y^2")).unwrap();
        let (_, gb) = good_basis(&lp).unwrap();
        let c = rat(5, 4);
        let twisted = twist(&lp, &c);
        let (_, gb_t) = good_basis(&twisted).unwrap();
        assert_eq!(gb_t.a1, gb.a1);
        // A0 shifts by c I.
        let mut expected_a0 = gb.a0.clone();
        for i in 0..lp.mu {
            expected_a0[(i, i)] += &c;
        }
        assert_eq!(gb_t.a0, expected_a0);
    }

    #[test]
    fn verify_catches_bad_spectrum() {
        let lp = t_matrix(&pxy("x^2 + y^2")).unwrap();
        let (_, gb) = good_basis(&lp).unwrap();
        let wrong = SpectrumMultiset::from_pairs(&[(rat(1, 2), 1)]);
        let report = verify_good_basis(&gb, &wrong);
        assert!(!report.eigenvalues_match_spectrum);
        assert!(!report.all_ok);
    }

    #[test]
    fn corrh_reconstruction() {
        // With A1 + k I invertible for all k in N (positivity), the d_t-matrix
        // (A0 - t I)^{-1} (A1 - I) is rational with entries vanishing at t = infinity.
        use crate::exactalg::unipoly::RatFun;
        let lp = t_matrix(&pxy("1/3x^3 - x + 1/2y^2")).unwrap();
        let (_, gb) = good_basis(&lp).unwrap();
        let mu = lp.mu;
        for k in 0..4i64 {
            let mut shifted = gb.a1.clone();
            for i in 0..mu {
                shifted[(i, i)] += Rational::from_integer(k.into());
            }
            assert!(shifted.inverse().is_ok(), "A1 + {k} I invertible");
        }
        // (A0 - t I) as a matrix over Q(t); invert and multiply by (A1 - I).
        let t = RatFun::from_poly(UniPoly::monomial(rat_int(1), 1));
        let n = mu;
        let mut m: Vec<Vec<RatFun>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = RatFun::from_poly(UniPoly::constant(gb.a0[(i, j)].clone()));
                        if i == j {
                            a.sub(&t)
                        } else {
                            a
                        }
                    })
                    .collect()
            })
            .collect();
        // Gauss-Jordan inverse over Q(t).
        let mut inv: Vec<Vec<RatFun>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { RatFun::one() } else { RatFun::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero()).unwrap();
            m.swap(col, p);
            inv.swap(col, p);
            let d = m[col][col].clone().recip();
            for j in 0..n {
                m[col][j] = m[col][j].mul(&d);
                inv[col][j] = inv[col][j].mul(&d);
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for j in 0..n {
                    m[r][j] = m[r][j].sub(&f.mul(&m[col][j]));
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
        // Connection matrix entries: sum_l inv[i][l] (A1 - I)[l][j]; each entry
        // must have numerator degree < denominator degree (pole order 1 at infinity).
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFun::zero();
                for l in 0..n {
                    let mut a = gb.a1[(l, j)].clone();
                    if l == j {
                        a -= Rational::one();
                    }
                    acc = acc.add(&inv[i][l].mul(&RatFun::from_poly(UniPoly::constant(a))));
                }
                if !acc.is_zero() {
                    assert!(acc.num.deg() < acc.den.deg());
                }
            }
        }
    }

    #[test]
    fn f_jordan_examples() {
        // [f] = 0 for x^3 + y^3 (A0 = 0): all blocks size 1.
        let lp = t_matrix(&pxy("x^3 + y^3")).unwrap();
        let vf = v_filtration(&lp).unwrap();
        let jt = crate::brieskorn::f_multiplication_jordan(&lp, &vf).unwrap();
        assert_eq!(jt, vec![1, 1, 1, 1]);

        // 1/3x^3 - x + 1/2y^2: graded [f] = 0 (5/6 + 1 = 11/6 is not a jump).
        let lp = t_matrix(&pxy("1/3x^3 - x + 1/2y^2")).unwrap();
        let vf = v_filtration(&lp).unwrap();
        let jt = crate::brieskorn::f_multiplication_jordan(&lp, &vf).unwrap();
        assert_eq!(jt, vec![1, 1]);
    }
}
