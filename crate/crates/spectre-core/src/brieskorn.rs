//! The concrete Brieskorn lattice of a polynomial on affine space: basis from
//! the Milnor algebra, the division reduction realizing df ^ eta = theta d(eta),
//! the matrix of t = theta^2 d/dtheta, twists, and the Jordan structure of
//! multiplication by f on the V-graded fiber.

use crate::error::{Error, Result};
use crate::exactalg::matrix::{in_row_span, nilpotent_jordan_type, reduce_mod_rows, QMatrix};
use crate::exactalg::rational::Rational;
use crate::exactalg::theta::{ThetaMatrix, ThetaPoly};
use crate::exactalg::unipoly::UniPoly;
use crate::groebner::MilnorData;
use crate::lattice::VFiltration;
use crate::newton::{axis_intercepts, delta_star, newton_polyhedron, NewtonPolyhedron};
use crate::poly::MultiPoly;
use num::Zero;

/// Coordinates of a class in G_0 with respect to the Brieskorn basis
/// {b * dx : b standard monomial}: one polynomial in theta per basis element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormCoords {
    pub coords: Vec<ThetaPoly>,
}

/// An abstract lattice pair (G, G_0): the rank and the matrix of
/// t = theta^2 d/dtheta over Q[theta]. Row i expands t.g_i in the basis g
/// (coordinates of elements therefore transform by the transpose).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePair {
    pub mu: usize,
    pub t_matrix: ThetaMatrix,
    /// n+1 for polynomial inputs; the symmetry center is weight_w / 2.
    pub weight_w: Option<i64>,
    /// "polynomial:<f>" or "abstract".
    pub provenance: String,
}

impl LatticePair {
    pub fn from_matrix(t_matrix: ThetaMatrix, weight_w: Option<i64>) -> Self {
        LatticePair {
            mu: t_matrix.size,
            t_matrix,
            weight_w,
            provenance: "abstract".to_string(),
        }
    }

    /// Constant part A_0: the multiplication-by-f matrix for polynomial inputs.
    pub fn a0(&self) -> QMatrix {
        self.t_matrix.coeff_matrix(0)
    }

    pub fn a1(&self) -> QMatrix {
        self.t_matrix.coeff_matrix(1)
    }
}

/// The class of u * dx in G_0 as theta-polynomial coordinates.
///
/// Each pass writes u = sum_b c_b b + sum_i a_i d_i f, deposits the c_b at the
/// current theta power, and replaces the Jacobian part by theta times the
/// divergence of the cofactors (df ^ eta = theta d(eta) with
/// eta = sum_i (-1)^i a_i dx_0 ^ ... ^ dx_i-hat ^ ... ^ dx_n).
pub fn reduce_form(u: &MultiPoly, md: &MilnorData) -> Result<FormCoords> {
    let cap = reduction_cap(md);
    let np = newton_polyhedron(&md.f).ok();
    let n = md.f.nvars();
    let mut coords = vec![ThetaPoly::zero(); md.mu];
    let mut current = u.clone();
    let mut trace: Vec<String> = Vec::new();
    let mut k = 0usize;
    while !current.is_zero() {
        if k > cap {
            return Err(Error::ReductionCap {
                cap,
                trace: trace.join(" -> "),
            });
        }
        trace.push(trace_entry(&current, np.as_ref()));
        let (c, a) = md.reduce_to_partials(&current);
        for (b, cb) in c.into_iter().enumerate() {
            if !cb.is_zero() {
                coords[b] = coords[b].add(&UniPoly::monomial(cb, k));
            }
        }
        let mut divergence = MultiPoly::zero(&md.f.vars);
        for (i, ai) in a.iter().enumerate().take(n) {
            divergence = divergence
                .add(&ai.partial(i).expect("index in range"))
                .expect("same ring");
        }
        current = divergence;
        k += 1;
    }
    Ok(FormCoords { coords })
}

fn reduction_cap(md: &MilnorData) -> usize {
    let n1 = md.f.nvars();
    let max_intercept = axis_intercepts(&md.f)
        .into_iter()
        .max()
        .unwrap_or(0)
        .max(md.f.total_degree())
        .max(1) as usize;
    4 * n1 * max_intercept * md.mu.max(1)
}

fn trace_entry(u: &MultiPoly, np: Option<&NewtonPolyhedron>) -> String {
    match np.and_then(|np| delta_star(u, np).ok()) {
        Some(ds) => format!("delta*={ds}"),
        None => format!("deg={}", u.total_degree()),
    }
}

/// The Brieskorn lattice pair of f: row i of the t-matrix is the expansion of
/// the class of f * b_i * dx in the standard-monomial basis.
pub fn t_matrix(f: &MultiPoly) -> Result<LatticePair> {
    let md = crate::groebner::milnor_data(f)?;
    t_matrix_from_milnor(&md)
}

pub fn t_matrix_from_milnor(md: &MilnorData) -> Result<LatticePair> {
    let mu = md.mu;
    let mut t = ThetaMatrix::zero(mu);
    for (i, b) in md.standard_monomials.iter().enumerate() {
        let u = md
            .f
            .mul(&MultiPoly::monomial_term(
                &md.f.vars,
                b.clone(),
                Rational::from_integer(1.into()),
            ))
            .expect("same ring");
        let fc = reduce_form(&u, md)?;
        for (j, p) in fc.coords.into_iter().enumerate() {
            t.set(i, j, p);
        }
    }
    Ok(LatticePair {
        mu,
        t_matrix: t,
        weight_w: Some(md.f.nvars() as i64),
        provenance: format!("polynomial:{}", md.f.render()),
    })
}

/// Twist by e^{c tau}: shifts the constant part of the t-matrix by c * I and
/// leaves everything else (in particular the spectrum) unchanged.
pub fn twist(lp: &LatticePair, c: &Rational) -> LatticePair {
    LatticePair {
        mu: lp.mu,
        t_matrix: lp.t_matrix.add_scalar(c),
        weight_w: lp.weight_w,
        provenance: if c.is_zero() {
            lp.provenance.clone()
        } else {
            format!("twist({}; {})", lp.provenance, c)
        },
    }
}

/// Jordan block sizes of the nilpotent map [f] : gr_beta -> gr_{beta+1}
/// induced by A_0 on the V-graded fiber G_0 / theta G_0.
pub fn f_multiplication_jordan(lp: &LatticePair, vf: &VFiltration) -> Result<Vec<usize>> {
    let mu = lp.mu;
    if mu == 0 {
        return Ok(Vec::new());
    }
    // Multiplication by f acts on coordinate columns by A_0 transposed.
    let op = lp.a0().transpose();

    // Jumps with positive multiplicity, in increasing order.
    let jumps: Vec<usize> = (0..vf.jumps.len())
        .filter(|&j| vf.jump_multiplicity(j) > 0)
        .collect();

    // Graded basis: lifts of gr_beta = V_beta / V_{<beta} inside Q^mu.
    let mut block_of: Vec<(Rational, Vec<Vec<Rational>>)> = Vec::new();
    for &j in &jumps {
        let beta = vf.jumps[j].beta.clone();
        let below = vf.subspace_strictly_below(j);
        let mut lifts: Vec<Vec<Rational>> = Vec::new();
        let mut seen: Vec<Vec<Rational>> = below.to_vec();
        for v in &vf.jumps[j].subspace {
            let red = reduce_mod_rows(&crate::exactalg::matrix::row_space_basis(&seen, mu), v);
            if red.iter().any(|c| !c.is_zero()) {
                lifts.push(v.clone());
                seen.push(v.clone());
            }
        }
        block_of.push((beta, lifts));
    }
    let total: usize = block_of.iter().map(|(_, l)| l.len()).sum();
    if total != mu {
        return Err(Error::Inconsistency(format!(
            "graded pieces sum to {total}, expected mu = {mu}"
        )));
    }

    // Grading compatibility: A_0 maps V_beta into V_{beta+1}.
    for (j_idx, &j) in jumps.iter().enumerate() {
        let beta = &vf.jumps[j].beta;
        let target = vf.subspace_at_or_below(&(beta + Rational::from_integer(1.into())));
        for v in &vf.jumps[j].subspace {
            let image = op.mul_vec(v);
            if image.iter().all(|c| c.is_zero()) {
                continue;
            }
            if !in_row_span(target, &image) {
                return Err(Error::Inconsistency(format!(
                    "A0 does not map the V_{} piece into V_{}",
                    beta,
                    beta + Rational::from_integer(1.into())
                )));
            }
        }
        let _ = j_idx;
    }

    // Assemble the graded operator in the lifted basis.
    let offsets: Vec<usize> = block_of
        .iter()
        .scan(0usize, |acc, (_, l)| {
            let off = *acc;
            *acc += l.len();
            Some(off)
        })
        .collect();
    let mut graded = QMatrix::zero(mu, mu);
    for (src_idx, (beta, lifts)) in block_of.iter().enumerate() {
        let beta_plus = beta + Rational::from_integer(1.into());
        let Some(dst_idx) = block_of.iter().position(|(b, _)| *b == beta_plus) else {
            continue; // gr_{beta+1} = 0: graded component vanishes
        };
        // Solve image = (V_{< beta+1} part) + (gr_{beta+1} lift part).
        let below = vf.subspace_strictly_below(jumps[dst_idx]);
        let dst_lifts = &block_of[dst_idx].1;
        let mut solver_rows: Vec<Vec<Rational>> = below.to_vec();
        solver_rows.extend(dst_lifts.iter().cloned());
        let solver = QMatrix::from_rows(solver_rows).transpose();
        for (col, v) in lifts.iter().enumerate() {
            let image = op.mul_vec(v);
            let Some(sol) = solver.solve(&image) else {
                return Err(Error::Inconsistency(
                    "graded image not in the expected subspace".into(),
                ));
            };
            for (row, coeff) in sol[below.len()..].iter().enumerate() {
                graded[(offsets[dst_idx] + row, offsets[src_idx] + col)] = coeff.clone();
            }
        }
    }
    nilpotent_jordan_type(&graded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{rat, rat_int};
    use crate::groebner::{milnor_data, milnor_data_with_order, MonomialOrder};
    use crate::poly::{parse, var_list};

    fn xy() -> Vec<String> {
        var_list(&["x", "y"])
    }

    fn p(s: &str) -> MultiPoly {
        parse(s, &xy()).unwrap()
    }

    fn theta_term(c: Rational, k: usize) -> ThetaPoly {
        UniPoly::monomial(c, k)
    }

    #[test]
    fn reduce_form_examples() {
        // u = f = x^3 + y^3 on basis {1, y, x, xy}: (2/3) theta [1]
        let f = p("x^3 + y^3");
        let md = milnor_data(&f).unwrap();
        let fc = reduce_form(&f, &md).unwrap();
        assert_eq!(fc.coords[0], theta_term(rat(2, 3), 1));
        for c in &fc.coords[1..] {
            assert!(c.is_zero());
        }

        // u = f * x -> theta [x]
        let fx = f.mul(&p("x")).unwrap();
        let fc = reduce_form(&fx, &md).unwrap();
        let x_idx = md
            .standard_monomials
            .iter()
            .position(|m| m.0 == vec![1, 0])
            .unwrap();
        for (i, c) in fc.coords.iter().enumerate() {
            if i == x_idx {
                assert_eq!(c, &theta_term(rat_int(1), 1));
            } else {
                assert!(c.is_zero());
            }
        }

        // u = f for f = 1/3x^3 - x + 1/2y^2: -(2/3)[x] + (5/6) theta [1]
        let f = p("1/3x^3 - x + 1/2y^2");
        let md = milnor_data(&f).unwrap();
        let fc = reduce_form(&f, &md).unwrap();
        assert_eq!(fc.coords[0], theta_term(rat(5, 6), 1)); // basis [1]
        assert_eq!(fc.coords[1], UniPoly::constant(rat(-2, 3))); // basis [x]
    }

    #[test]
    fn t_matrix_examples() {
        // x^3 + y^3 -> theta * diag(2/3, 1, 1, 4/3)
        let lp = t_matrix(&p("x^3 + y^3")).unwrap();
        assert_eq!(lp.mu, 4);
        let expect = [rat(2, 3), rat_int(1), rat_int(1), rat(4, 3)];
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    assert_eq!(lp.t_matrix.get(i, j), &theta_term(expect[i].clone(), 1));
                } else {
                    assert!(lp.t_matrix.get(i, j).is_zero());
                }
            }
        }
        assert_eq!(lp.weight_w, Some(2));

        // 1/3x^3 - x + 1/2y^2 -> A0 = [[0,-2/3],[-2/3,0]], A1 = diag(5/6,7/6)
        let lp = t_matrix(&p("1/3x^3 - x + 1/2y^2")).unwrap();
        assert_eq!(lp.t_matrix.deg(), 1);
        let a0 = lp.a0();
        assert_eq!(a0[(0, 0)], rat_int(0));
        assert_eq!(a0[(0, 1)], rat(-2, 3));
        assert_eq!(a0[(1, 0)], rat(-2, 3));
        assert_eq!(a0[(1, 1)], rat_int(0));
        let a1 = lp.a1();
        assert_eq!(a1[(0, 0)], rat(5, 6));
        assert_eq!(a1[(1, 1)], rat(7, 6));
        assert_eq!(a1[(0, 1)], rat_int(0));
        assert_eq!(a1[(1, 0)], rat_int(0));

        // x^2 + y^2 + 1 -> (1) + theta (1)
        let lp = t_matrix(&p("x^2 + y^2 + 1")).unwrap();
        assert_eq!(lp.mu, 1);
        assert_eq!(
            lp.t_matrix.get(0, 0),
            &UniPoly::new(vec![rat_int(1), rat_int(1)])
        );
    }

    #[test]
    fn t_matrix_constant_part_is_multiplication_by_f() {
        // char_poly(A0) has roots the critical values: +-2/3 for 1/3x^3 - x + 1/2y^2.
        let lp = t_matrix(&p("1/3x^3 - x + 1/2y^2")).unwrap();
        let cp = crate::exactalg::matrix::char_poly(&lp.a0()).unwrap();
        let (roots, rest) = crate::exactalg::unipoly::rational_root_factor(&cp).unwrap();
        assert_eq!(roots, vec![(rat(-2, 3), 1), (rat(2, 3), 1)]);
        assert!(rest.is_constant());
    }

    #[test]
    fn twist_examples() {
        let lp = t_matrix(&p("x^2 + y^2 + 1")).unwrap();
        let tw = twist(&lp, &rat_int(-1));
        // A0 = (0), A1 = (1): matches the direct t-matrix of x^2 + y^2.
        let direct = t_matrix(&p("x^2 + y^2")).unwrap();
        assert_eq!(tw.t_matrix, direct.t_matrix);

        assert_eq!(twist(&lp, &rat_int(0)).t_matrix, lp.t_matrix);
        let back = twist(&twist(&lp, &rat(3, 7)), &rat(-3, 7));
        assert_eq!(back.t_matrix, lp.t_matrix);
    }

    #[test]
    fn reduction_order_independence() {
        // Identical FormCoords from grevlex and lex cofactor routes (same staircase).
        for f in ["x^3 + y^3", "1/3x^3 - x + 1/2y^2", "x^2 + y^3 + x*y"] {
            let f = p(f);
            let md_g = milnor_data_with_order(&f, MonomialOrder::GrevLex).unwrap();
            let md_l = milnor_data_with_order(&f, MonomialOrder::Lex).unwrap();
            assert_eq!(md_g.standard_monomials, md_l.standard_monomials);
            let probe = f.mul(&p("x + y + 1")).unwrap();
            let a = reduce_form(&probe, &md_g).unwrap();
            let b = reduce_form(&probe, &md_l).unwrap();
            assert_eq!(a, b, "order independence for {}", f);
        }
    }

    #[test]
    fn reduction_soundness_invariant() {
        // u - (sum c_b b + sum a_i d_i f) = 0 exactly at every step.
        let f = p("x^2 + y^3 + x*y");
        let md = milnor_data(&f).unwrap();
        let probe = f.mul(&f).unwrap();
        let (c, a) = md.reduce_to_partials(&probe);
        let mut acc = MultiPoly::zero(&xy());
        for (idx, m) in md.standard_monomials.iter().enumerate() {
            acc = acc
                .add(&MultiPoly::monomial_term(&xy(), m.clone(), c[idx].clone()))
                .unwrap();
        }
        for (i, ai) in a.iter().enumerate() {
            acc = acc.add(&ai.mul(&md.partials[i]).unwrap()).unwrap();
        }
        assert_eq!(acc, probe);
    }
}
