use std::collections::BTreeMap;

use num_traits::Zero;

use walg::dsred::{KValue, LaxOperator, LoopPoly, Reduction};
use walg::hamflow::*;
use walg::liealg::{make_sl, LoopElement, Nilpotent};
use walg::pva::LambdaPoly;
use walg::{q, qf, Alg, DiffPoly, Q};

/// 2×2 matrices with Laurent-polynomial entries: `(row, col, z-power) ↦ coefficient`.
#[derive(Clone, Debug, PartialEq)]
struct Mat(BTreeMap<(usize, usize, i32), DiffPoly>);

impl Mat {
    fn zero() -> Self {
        Mat(BTreeMap::new())
    }

    fn entry(r: usize, c: usize, z: i32, p: DiffPoly) -> Self {
        let mut m = Mat::zero();
        m.add(r, c, z, &p);
        m
    }

    fn add(&mut self, r: usize, c: usize, z: i32, p: &DiffPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.0.entry((r, c, z)).or_insert_with(|| DiffPoly::zero(p.algebra()));
        *e += p;
        if e.is_zero() {
            self.0.remove(&(r, c, z));
        }
    }

    fn plus(&self, o: &Mat, s: &Q) -> Mat {
        let mut out = self.clone();
        for ((r, c, z), p) in &o.0 {
            out.add(*r, *c, *z, &p.scale(s));
        }
        out
    }

    fn mul(&self, o: &Mat) -> Mat {
        let mut out = Mat::zero();
        for ((r, c, z), p) in &self.0 {
            for ((r2, c2, z2), p2) in &o.0 {
                if c == r2 {
                    out.add(*r, *c2, z + z2, &(p * p2));
                }
            }
        }
        out
    }

    fn comm(&self, o: &Mat) -> Mat {
        self.mul(o).plus(&o.mul(self), &q(-1))
    }

    fn derivative(&self) -> Mat {
        let mut out = Mat::zero();
        for ((r, c, z), p) in &self.0 {
            out.add(*r, *c, *z, &p.derivative());
        }
        out
    }

    /// Doubled gr₂ of `E_rc z^j` for principal sl₂: `4j + 2(c − r)`.
    fn level(&self, t: i32) -> Mat {
        Mat(self.0.iter().filter(|((r, c, z), _)| 4 * z + 2 * (*c as i32 - *r as i32) == t).map(|(k, v)| (*k, v.clone())).collect())
    }

    fn truncate(&self, t: i32) -> Mat {
        Mat(self.0.iter().filter(|((r, c, z), _)| 4 * z + 2 * (*c as i32 - *r as i32) <= t).map(|(k, v)| (*k, v.clone())).collect())
    }

    fn scale_poly(&self, p: &DiffPoly) -> Mat {
        let mut out = Mat::zero();
        for ((r, c, z), x) in &self.0 {
            out.add(*r, *c, *z, &(x * p));
        }
        out
    }
}

fn cst(alg: &Alg, c: i64) -> DiffPoly {
    DiffPoly::constant(alg, q(c))
}

/// `e^{ad S}(k∂ + Q) − k∂` through level `t`, by matrix commutators.
fn gauge(s: &Mat, k: &DiffPoly, qm: &Mat, t: i32) -> Mat {
    let mut out = qm.truncate(t);
    // ad S (k∂) = −k ∂S
    let mut x = s.comm(qm).plus(&s.derivative().scale_poly(k), &q(-1)).truncate(t);
    let mut fact = q(1);
    let mut r = 1;
    while !x.0.is_empty() {
        fact *= q(r);
        out = out.plus(&x, &(q(1) / &fact));
        x = s.comm(&x).truncate(t);
        r += 1;
    }
    out
}

fn system() -> HamiltonianSystem {
    let l = make_sl(2, Nilpotent::Principal).unwrap();
    HamiltonianSystem::new(&l, 1, KValue::Symbol, 3).unwrap()
}

struct Oracle {
    k: DiffPoly,
    lambda: Mat,
    q: Mat,
}

fn oracle(sys: &HamiltonianSystem) -> Oracle {
    let alg = sys.gamma.alg.clone();
    let g = |l: &str| sys.gamma(l);
    let mut qm = Mat::entry(0, 0, 0, g("x"));
    qm.add(1, 1, 0, &-g("x"));
    qm.add(0, 1, 0, &g("f"));
    qm.add(1, 0, 0, &g("e"));
    qm.add(0, 1, -1, &g("fz"));
    let mut lambda = Mat::entry(0, 1, -2, cst(&alg, -1));
    lambda.add(1, 0, -1, &cst(&alg, -1));
    Oracle { k: DiffPoly::named(&alg, "k"), lambda, q: qm }
}

impl Oracle {
    fn h(&self, z: i32, c: &DiffPoly) -> Mat {
        let mut m = Mat::entry(0, 0, z, c.clone());
        m.add(1, 1, z, &-c.clone());
        m
    }

    /// `Λ z^j ⊗ c`
    fn lam(&self, j: i32, c: &DiffPoly) -> Mat {
        let mut m = Mat::zero();
        for ((r, col, z), p) in &self.lambda.0 {
            m.add(*r, *col, z + j, &(p * c));
        }
        m
    }

    /// `e^{ad S}L − k∂ − Λ` through level `t`.
    fn transformed(&self, s: &Mat, t: i32) -> Mat {
        gauge(s, &self.k, &self.q.plus(&self.lambda, &q(1)), t).plus(&self.lambda, &q(-1))
    }
}

fn to_mat(sys: &HamiltonianSystem, p: &LoopPoly) -> Mat {
    let lie = &sys.red.lie;
    let mut out = Mat::zero();
    for ((j, i), c) in p.terms() {
        let m = lie.matrix(&lie.basis(*i));
        for r in 0..2 {
            for col in 0..2 {
                if !m[r][col].is_zero() {
                    out.add(r, col, *j, &c.scale(&m[r][col]));
                }
            }
        }
    }
    out
}

fn parse(sys: &HamiltonianSystem, s: &str) -> DiffPoly {
    DiffPoly::parse(&sys.gamma.alg, s).unwrap()
}

#[test]
fn matrix_oracle_reproduces_diagonalization() {
    let sys = system();
    let o = oracle(&sys);
    let lie = &sys.red.lie;
    let (ge, gfz, gx, gf) = (sys.gamma("e"), sys.gamma("fz"), sys.gamma("x"), sys.gamma("f"));
    // S₂ = hz ⊗ ¼(γ_fz − γ_e), S₃ = Kz ⊗ (−½γ_x) with K = −e + fz
    let s2 = o.h(1, &(&gfz - &ge).scale(&qf(1, 4)));
    let half_x = gx.scale(&qf(-1, 2));
    let s3 = Mat::entry(0, 1, 1, -half_x.clone()).plus(&Mat::entry(1, 0, 2, half_x), &q(1));
    assert_eq!(to_mat(&sys, &sys.diag.s_level(lie, 4)), s2);
    assert_eq!(to_mat(&sys, &sys.diag.s_level(lie, 6)), s3);
    let s = to_mat(&sys, &sys.diag.s);
    let x = o.transformed(&s, 6);
    // h₋₁ = Λz ⊗ (−½)(γ_fz + γ_e), h₀ = h₂ = 0
    assert_eq!(x.level(-2), o.lam(1, &(&gfz + &ge).scale(&qf(-1, 2))));
    assert!(x.level(0).0.is_empty());
    assert!(x.level(4).0.is_empty());
    // h₃ as displayed
    let c3 = parse(&sys, "1/2*g_x^2 + (g_e - g_fz)*(1/16*g_fz^2 - 1/16*g_e^2 + 1/4*g_f)");
    assert_eq!(x.level(6), o.lam(3, &c3));
    // h₁: the quadratic term carries 1/8
    let c1 = (&gf.scale(&qf(-1, 2))) - &(&gfz - &ge).pow(2).scale(&qf(1, 8));
    assert_eq!(x.level(2), o.lam(2, &c1));
    for t in [-2, 2, 6] {
        assert_eq!(to_mat(&sys, &sys.diag.h_level(lie, t)), x.level(t));
    }
}

#[test]
fn displayed_s4_does_not_diagonalize() {
    // with the displayed S₄ the level-2 part leaves ker ad Λ
    let sys = system();
    let o = oracle(&sys);
    let (ge, gfz) = (sys.gamma("e"), sys.gamma("fz"));
    let s2 = o.h(1, &(&gfz - &ge).scale(&qf(1, 4)));
    let gx = sys.gamma("x").scale(&qf(-1, 2));
    let s3 = Mat::entry(0, 1, 1, -gx.clone()).plus(&Mat::entry(1, 0, 2, gx), &q(1));
    let s4 = o.h(2, &parse(&sys, "1/4*g_f + 1/16*g_fz^2 - 3/16*g_e^2 + 1/8*g_fz*g_e"));
    let s = s2.plus(&s3, &q(1)).plus(&s4, &q(1));
    let x2 = o.transformed(&s, 2).level(2);
    assert!(!x2.comm(&o.lambda).0.is_empty());
    let ours = sys.diag.s_level(&sys.red.lie, 8);
    assert_eq!(to_mat(&sys, &ours), o.h(2, &parse(&sys, "1/4*g_f - 1/8*g_e^2 + 1/8*g_fz^2")));
}

#[test]
fn diagonalization_residual_vanishes() {
    let sys = system();
    let lax = LaxOperator { k: DiffPoly::named(&sys.gamma.alg, "k"), q: sys.gamma.qcan.clone() };
    let r = diagonal_residual(&sys.red.lie, &sys.red.lambda, &lax, &sys.diag).unwrap();
    assert!(r.is_zero());
    let (lo, _) = sys.diag.s.gr2_range(&sys.red.lie).unwrap();
    assert!(lo > 0);
}

#[test]
fn diagonal_input_needs_no_gauge() {
    let l = make_sl(2, Nilpotent::Principal).unwrap();
    let red = Reduction::new(&l, 1, KValue::Symbol).unwrap();
    let alg = red.algebra().clone();
    let u = DiffPoly::var(&alg, red.gens()[0]);
    let q = LoopPoly::from_element(&alg, &red.lambda.shift(2), &u);
    let lax = LaxOperator { k: red.k().clone(), q: q.clone() };
    let d = diagonalize(&red.lie, &red.lambda, &lax, 6).unwrap();
    assert!(d.s.is_zero());
    assert_eq!(d.h, q);
}

#[test]
fn hamiltonians_match_display() {
    let sys = system();
    assert_eq!(sys.hams[0], parse(&sys, "-1/2*g_f - 1/8*(g_fz - g_e)^2"));
    assert_eq!(sys.hams[1], parse(&sys, "1/2*g_x^2 + (g_e - g_fz)*(1/16*g_fz^2 - 1/16*g_e^2 + 1/4*g_f)"));
    let lie = &sys.red.lie;
    let zero = LoopElement::zero();
    assert!(hamiltonian_density(lie, &sys.red.lambda, &sys.diag, &zero).unwrap().is_zero());
    let off = LoopElement::from_vector(&lie.e, 0);
    assert!(hamiltonian_density(lie, &sys.red.lambda, &sys.diag, &off).is_err());
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn hamiltonian_brackets() {
    let sys = system();
    let mut n = 0;
    for l in golden("sl2_m1_hamiltonian_brackets.txt").lines() {
        let l = l.split('#').next().unwrap().trim();
        if l.is_empty() {
            continue;
        }
        // {H<n>, <label>}_<i> = value
        let (lhs, rhs) = l.split_once('=').unwrap();
        let (pair, which) = lhs.trim().rsplit_once('_').unwrap();
        let (h, g) = pair.trim_matches(|c| c == '{' || c == '}').split_once(',').unwrap();
        let h = &sys.hams[h.trim().trim_start_matches('H').parse::<usize>().unwrap()];
        let p = if which == "1" { &sys.p1 } else { &sys.p2 };
        let expected = LambdaPoly::parse(&sys.gamma.alg, rhs).unwrap();
        assert_eq!(p.bracket(h, &sys.gamma(g.trim())), expected, "{l}");
        n += 1;
    }
    assert_eq!(n, 16);
}

#[test]
fn first_flow_and_kdv() {
    let sys = system();
    let flow: BTreeMap<String, DiffPoly> = sys.flow(0).into_iter().collect();
    assert_eq!(flow["g_f"], parse(&sys, "g_x*(g_fz - g_e) + 1/2*k*(g_fz' - g_e')"));
    assert_eq!(flow["g_x"], parse(&sys, "-1/2*g_e*(g_fz - g_e) - 1/2*g_f"));
    assert_eq!(flow["g_e"], parse(&sys, "g_x"));
    assert_eq!(flow["g_fz"], parse(&sys, "-g_x"));
    assert!(sys.is_central(&parse(&sys, "g_e + g_fz")));
    assert!(!sys.is_central(&parse(&sys, "g_e")));
    let kdv = reduce_to_kdv(&sys).unwrap();
    let quot: BTreeMap<String, DiffPoly> = kdv.quotient.into_iter().collect();
    assert_eq!(quot["g_f"], parse(&sys, "-2*g_x*g_e - k*g_e'"));
    assert_eq!(quot["g_x"], parse(&sys, "g_e^2 - 1/2*g_f"));
    assert_eq!(quot["g_e"], parse(&sys, "g_x"));
    let coeffs: BTreeMap<String, Q> = kdv.coefficients.into_iter().collect();
    assert_eq!(coeffs["g_e*g_e_t"], q(3));
    assert_eq!(coeffs["k*g_e_x"], qf(1, 2));
    assert!(coeffs.iter().filter(|(k, _)| !["g_e*g_e_t", "k*g_e_x"].contains(&k.as_str())).all(|(_, c)| *c == q(0)));
    assert_eq!(kdv.equation.to_string(), "g_e_ttt = 3*g_e*g_e_t + 1/2*k*g_e_x");
}

#[test]
fn two_brackets_give_one_flow() {
    let sys = system();
    assert!(sys.double_hamiltonian().iter().all(|r| r.pass));
    // on sl₂: {H₁ λ γ_e}₁ = γ_x and {H₀ λ γ_e}₂ = γ_x − ½kλ
    assert_eq!(sys.p1.bracket(&sys.hams[1], &sys.gamma("e")), LambdaPoly::parse(&sys.gamma.alg, "g_x").unwrap());
    assert_eq!(sys.p2.bracket(&sys.hams[0], &sys.gamma("e")), LambdaPoly::parse(&sys.gamma.alg, "g_x - 1/2*k*L").unwrap());
    let zero = DiffPoly::zero(&sys.gamma.alg);
    assert!(double_hamiltonian_check(&sys.p1, &sys.p2, &zero, &zero, &sys.gens()).iter().all(|r| r.pass));
}

#[test]
fn hamiltonians_are_conserved_and_independent() {
    let sys = system();
    assert!(sys.involution_matrix().iter().flatten().all(|&b| b));
    let fs: Vec<LocalFunctional> = sys.hams.iter().cloned().map(LocalFunctional::new).collect();
    assert!(linearly_independent(&fs, &sys.gens()));
    // ∫{H₁, H_i}₁ = 0 is the conservation of H_i along the first flow
    for f in &fs {
        assert!(involution_check(&sys.p1, &fs[1], f));
    }
    // each flow conserves the earlier densities
    for n in 0..fs.len() {
        for h in &fs[..=n] {
            let dt: DiffPoly = sys
                .flow(n)
                .iter()
                .map(|(g, r)| {
                    let id = sys.gamma.alg.gen(g).unwrap();
                    h.density.variational(id) * r
                })
                .fold(DiffPoly::zero(&sys.gamma.alg), |a, b| a + b);
            assert!(dt.is_total_derivative());
        }
    }
    // δH/δu⁰ is not constant, so the independence argument applies
    let z0: Vec<_> = ["f", "x", "e"].iter().map(|l| sys.gamma.id(l).unwrap()).collect();
    assert!(z0.iter().any(|&g| sys.hams[0].variational(g).as_constant().is_none()));
}

#[test]
fn variational_identity_on_the_window() {
    let l = make_sl(2, Nilpotent::Principal).unwrap();
    let red = Reduction::new(&l, 1, KValue::Symbol).unwrap();
    let lax = red.universal_lax();
    let d = diagonalize(&red.lie, &red.lambda, &lax, required_level(&red, 3)).unwrap();
    let sys = system();
    for n in 0..3 {
        let b = hamiltonian_element(&red, n);
        let h = hamiltonian_density(&red.lie, &red.lambda, &d, &b).unwrap();
        assert!(variational_identity_check(&red, &d.s, &b, &h).unwrap().iter().all(|r| r.pass));
        // the γ-side Hamiltonian is the same functional
        let hw = sys.gamma.to_window(&sys.red, &sys.hams[n as usize]);
        assert!(LocalFunctional::new(hw).equivalent(&LocalFunctional::new(h.clone())));
        let bad = &h + &DiffPoly::var(red.algebra(), red.gens()[1]).pow(2);
        assert!(variational_identity_check(&red, &d.s, &b, &bad).unwrap().iter().any(|r| !r.pass));
    }
}

#[test]
fn minimal_sl3_hierarchy() {
    let l = make_sl(3, Nilpotent::Minimal).unwrap();
    let sys = HamiltonianSystem::new(&l, 1, KValue::Symbol, 2).unwrap();
    assert!(sys.double_hamiltonian().iter().all(|r| r.pass));
    assert!(sys.involution_matrix().iter().flatten().all(|&b| b));
}

#[test]
fn kdv_lenard_scheme() {
    let c = qf(3, 2);
    let hs = kdv_hierarchy(&c, 4).unwrap();
    let (ph, pk) = kdv_pair(&c).unwrap();
    let alg = ph.algebra().clone();
    let p = |s: &str| DiffPoly::parse(&alg, s).unwrap();
    let u = p("u");
    assert!(hs[1].equivalent(&LocalFunctional::new(p("1/2*u^2"))));
    assert!(hs[2].equivalent(&LocalFunctional::new(p("1/2*u^3 + 3/4*u*u''"))));
    assert!(evolution(&pk, &hs[0].density, &u).is_zero());
    assert_eq!(evolution(&pk, &hs[1].density, &u), p("u'"));
    assert_eq!(evolution(&ph, &hs[0].density, &u), p("u'"));
    assert_eq!(evolution(&pk, &hs[2].density, &u), p("3*u*u' + 3/2*u'''"));
    for t in 0..4 {
        assert_eq!(evolution(&ph, &hs[t].density, &u), evolution(&pk, &hs[t + 1].density, &u));
    }
    for a in &hs {
        for b in &hs {
            assert!(involution_check(&ph, a, b) && involution_check(&pk, a, b));
        }
    }
    let zero = LocalFunctional::new(DiffPoly::zero(&alg));
    assert!(lenard_step(&zero, &ph, &pk).unwrap().unwrap().density.is_zero());
}
