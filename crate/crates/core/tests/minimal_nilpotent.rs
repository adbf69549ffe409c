use walg::diffalg::{DiffPoly, Q};
use walg::dsred::{canonical_form, reduce, Complement, GammaAlgebra, KValue, Reduction};
use walg::liealg::{gr2, make_sl, LieAlgebra, LoopElement, Nilpotent};
use walg::pva::LambdaPoly;
use walg::wmin::{eta_bracket_prediction, matrix_form, sln_fast_path, EtaMap};
use walg::{q, qf};

fn minimal(n: usize, m: u32) -> Reduction {
    Reduction::new(&make_sl(n, Nilpotent::Minimal).unwrap(), m, KValue::Symbol).unwrap()
}

#[test]
fn eta_generators_are_gauge_invariant() {
    for (n, m) in [(3, 1), (3, 2), (4, 1)] {
        let red = minimal(n, m);
        let (_, table) = reduce(&red).unwrap();
        let eta = EtaMap::new(&red).unwrap();
        let gens = eta.generators(&table).unwrap();
        assert_eq!(gens.len(), table.len());
        for (label, el, p) in &gens {
            assert!(red.is_gauge_invariant(p), "sl{n} m={m}: η({label})");
            // leading term is the element itself
            let tail = p - &red.var(el);
            let g = el.gr2(&red.lie).unwrap();
            for jet in tail.jets() {
                let (j, i) = red.element_of(jet.gen).unwrap();
                assert!(gr2(&red.lie, j, i) > g, "η({label}) tail");
            }
        }
    }
}

fn bracket_tables_match(red: &Reduction) -> (usize, usize) {
    let (_, table) = reduce(red).unwrap();
    let eta = EtaMap::new(red).unwrap();
    let gens = eta.generators(&table).unwrap();
    let (p1, p2) = red.fractional_presentations();
    let mut stated = [0usize; 2];
    for (which, p) in [(0, &p1), (1, &p2)] {
        for (la, a, pa) in &gens {
            for (lb, b, pb) in &gens {
                if let Some(exp) = eta_bracket_prediction(&eta, a, b, which == 1).unwrap() {
                    assert_eq!(p.bracket(pa, pb), exp, "bracket {} of η({la}), η({lb})", which + 1);
                    stated[which] += 1;
                }
            }
        }
    }
    (stated[0], stated[1])
}

#[test]
fn eta_bracket_tables_sl3() {
    for m in [1, 2] {
        let (s1, s2) = bracket_tables_match(&minimal(3, m));
        assert!(s1 > 100 && s2 > 80, "{s1} {s2}");
    }
}

#[test]
fn eta_named_brackets() {
    let red = minimal(3, 1);
    let eta = EtaMap::new(&red).unwrap();
    let l = &red.lie;
    let (p1, p2) = red.fractional_presentations();
    let f = eta.eta(&LoopElement::from_vector(&l.f, 0)).unwrap();
    let fz = eta.eta(&LoopElement::from_vector(&l.f, 1)).unwrap();
    let x = eta.eta(&LoopElement::from_vector(&l.x, 0)).unwrap();
    let alg = red.algebra();
    assert_eq!(p1.bracket(&f, &f), LambdaPoly::parse(alg, "-2*k*L").unwrap());
    let mut exp = LambdaPoly::constant(x.scale(&q(-2)));
    exp.add_at(1, &DiffPoly::parse(alg, "-k").unwrap());
    assert_eq!(p2.bracket(&fz, &f), exp);
}

#[test]
fn restated_coefficients_agree_with_tilde() {
    // on g_f z^m the ½ and ⅓ weighted forms give the same polynomial as η̃
    let red = minimal(3, 1);
    let l = &red.lie;
    let eta = EtaMap::new(&red).unwrap();
    let (z, zs) = eta.frame();
    let s2 = 2 * eta.s();
    let zm = |i: usize| red.var(&LoopElement::from_vector(&z[i], 1));
    let v = |x: &[Q]| red.var(&LoopElement::from_vector(x, 1));
    for (name, c1, c2) in [("E2", qf(1, 2), q(0)), ("e21", q(1), qf(1, 3)), ("e32", q(1), qf(1, 3))] {
        let gf = l.basis(l.index(name).unwrap());
        let mut p = v(&gf);
        for i in 0..s2 {
            p += (&zm(i) * &v(&l.bracket(&gf, &zs[i]))).scale(&c1);
            for j in 0..s2 {
                let w = l.bracket(&l.bracket(&gf, &zs[i]), &zs[j]);
                p += (&(&zm(j) * &zm(i)) * &v(&w)).scale(&c2);
            }
        }
        assert_eq!(p, eta.tilde(&LoopElement::from_vector(&gf, 1)).unwrap(), "{name}");
    }
}

#[test]
fn sl2_eta_is_gamma() {
    for m in [1, 2] {
        let red = Reduction::new(&make_sl(2, Nilpotent::Principal).unwrap(), m, KValue::Value(q(1))).unwrap();
        let (_, table) = reduce(&red).unwrap();
        let eta = EtaMap::new(&red).unwrap();
        assert_eq!(eta.s(), 0);
        for (label, _, p) in eta.generators(&table).unwrap() {
            assert_eq!(p, table.get(&label).unwrap().gamma, "m={m} {label}");
        }
    }
}

#[test]
fn eta_and_gamma_generate_the_same_algebra() {
    let red = minimal(3, 1);
    let (_, table) = reduce(&red).unwrap();
    let gamma = GammaAlgebra::new(&red, &table).unwrap();
    let eta = EtaMap::new(&red).unwrap();
    for (label, el, p) in eta.generators(&table).unwrap() {
        let w = gamma.rewrite(&red, &p).unwrap();
        let tail = &w - &gamma.var(&label);
        let g = el.gr2(&red.lie).unwrap();
        for jet in tail.jets() {
            let name = gamma.alg.name(jet.gen).strip_prefix("g_").unwrap().to_string();
            if name.is_empty() {
                continue;
            }
            let other = table.get(&name).unwrap();
            assert!(other.gr2 > g, "η({label}) involves γ_{name}");
        }
    }
}

/// `{P, a}` on order-zero polynomials, by Leibniz over window variables.
fn poisson(red: &Reduction, p: &DiffPoly, a: &LoopElement) -> DiffPoly {
    let mut out = DiffPoly::zero(red.algebra());
    for jet in p.jets() {
        assert_eq!(jet.order, 0);
        let (j, i) = red.element_of(jet.gen).unwrap();
        let br = LoopElement::from_vector(&red.lie.basis(i), j).bracket(&red.lie, a);
        out += &p.partial(jet) * &red.var(&br);
    }
    out
}

fn nested_sum(red: &Reduction, stars: &[LoopElement], p: &DiffPoly, r: usize) -> Vec<DiffPoly> {
    // all index tuples of length r, in lexicographic order
    let mut cur = vec![p.clone()];
    for _ in 0..r {
        cur = cur.iter().flat_map(|c| stars.iter().map(move |s| poisson(red, c, s))).collect();
    }
    cur
}

#[test]
fn nested_bracket_binomial_identity() {
    let red = minimal(3, 1);
    let eta = EtaMap::new(&red).unwrap();
    let stars: Vec<LoopElement> = eta.frame().1.iter().map(|v| LoopElement::from_vector(v, 0)).collect();
    let gens = red.gens();
    let alg = red.algebra();
    let fact = |n: usize| (1..=n).fold(Q::from_integer(1.into()), |a, b| a * Q::from_integer((b as i64).into()));
    for (x, &a) in gens.iter().enumerate().step_by(3) {
        for &b in gens.iter().skip(x).step_by(4) {
            let (v, w) = (DiffPoly::var(alg, a), DiffPoly::var(alg, b));
            for r in 1..=3usize {
                let lhs = nested_sum(&red, &stars, &(&v * &w), r)
                    .into_iter()
                    .fold(DiffPoly::zero(alg), |acc, t| acc + t)
                    .scale(&(Q::from_integer(1.into()) / fact(r)));
                let mut rhs = DiffPoly::zero(alg);
                for l in 0..=r {
                    let vs = nested_sum(&red, &stars, &v, l);
                    let ws = nested_sum(&red, &stars, &w, r - l);
                    // tuples split as (first l indices, last r−l indices)
                    let mut s = DiffPoly::zero(alg);
                    for p in &vs {
                        for q in &ws {
                            s += p * q;
                        }
                    }
                    rhs.add_scaled(&s, &(Q::from_integer(1.into()) / (fact(l) * fact(r - l))));
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}

fn check_fast_path(l: &LieAlgebra, m: u32) {
    let red = Reduction::new(l, m, KValue::Symbol).unwrap();
    let comp = Complement::centralizer_of_e(l);
    let (_, can) = canonical_form(&red, &red.universal_lax(), &comp).unwrap();
    let fp = sln_fast_path(&red).unwrap();
    assert_eq!(fp.qbar, can.q, "sl{} m={m}", l.n);
}

#[test]
fn matrix_gauge_matches_generic_canonical_form() {
    check_fast_path(&make_sl(2, Nilpotent::Principal).unwrap(), 1);
    check_fast_path(&make_sl(2, Nilpotent::Principal).unwrap(), 2);
    for (n, m) in [(3, 1), (3, 2), (4, 1), (5, 1)] {
        check_fast_path(&make_sl(n, Nilpotent::Minimal).unwrap(), m);
    }
}

#[test]
fn matrix_gauge_entry_formulas() {
    // the unambiguous entry formulas of the matrix gauge, with E the entries of q + Λ
    let red = minimal(4, 1);
    let n = red.lie.n;
    let m = red.m as i32;
    let alg = red.algebra();
    let fp = sln_fast_path(&red).unwrap();
    let mut full = red.universal_lax().q;
    full += &walg::dsred::LoopPoly::constant(alg, &red.lambda);
    let e = matrix_form(&red, &full);
    let mut qb = fp.qbar.clone();
    qb += &walg::dsred::LoopPoly::constant(alg, &red.lambda);
    let a = matrix_form(&red, &qb);
    let s = &fp.s;
    let zero = DiffPoly::zero(alg);
    let get = |mm: &std::collections::BTreeMap<i32, Vec<Vec<DiffPoly>>>, r: i32, i: usize, j: usize| {
        mm.get(&-r).map(|x| x[i][j].clone()).unwrap_or_else(|| zero.clone())
    };
    assert_eq!(get(&e, m, n - 1, 0), DiffPoly::constant(alg, q(-1)));
    for r in 0..=m {
        if r < m {
            assert_eq!(get(&a, r, n - 1, 0), get(&e, r, n - 1, 0));
        }
        for i in 1..n - 1 {
            let ai1 = &get(&e, r, i, 0) + &(&s[i][n - 1] * &get(&e, r, n - 1, 0));
            assert_eq!(get(&a, r, i, 0), ai1);
            let anj = &get(&e, r, n - 1, i) - &(&get(&e, r, n - 1, 0) * &s[0][i]);
            assert_eq!(get(&a, r, n - 1, i), anj);
            for j in 1..n - 1 {
                let aij = &(&get(&e, r, i, j) + &(&s[i][n - 1] * &get(&e, r, n - 1, j))) - &(&ai1 * &s[0][j]);
                assert_eq!(get(&a, r, i, j), aij);
            }
        }
    }
}
