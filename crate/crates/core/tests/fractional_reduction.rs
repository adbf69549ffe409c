use walg::dsred::{reduce, GammaAlgebra, KValue, Reduction};
use walg::liealg::{make_sl, Nilpotent};
use walg::pva::{check_all_pairs, check_all_triples, check_compatibility, LambdaPoly, Presentation};
use walg::{q, DiffPoly};

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty())
}

fn sl2(m: u32) -> Reduction {
    Reduction::new(&make_sl(2, Nilpotent::Principal).unwrap(), m, KValue::Value(q(1))).unwrap()
}

fn check_generators(m: u32) {
    let red = sl2(m);
    let (_, table) = reduce(&red).unwrap();
    let text = golden(&format!("sl2_m{m}_generators.txt"));
    let mut expected = Vec::new();
    for l in lines(&text) {
        let (label, rhs) = l.split_once('=').unwrap();
        expected.push((label.trim().to_string(), DiffPoly::parse(red.algebra(), rhs).unwrap()));
    }
    let got: Vec<(String, DiffPoly)> = table.gens.iter().map(|g| (g.label.clone(), g.gamma.clone())).collect();
    assert_eq!(got, expected);
}

fn check_table(p: &Presentation, file: &str) {
    let alg = p.algebra().clone();
    for l in lines(&golden(file)) {
        let rest = l.strip_prefix('{').unwrap();
        let (pair, value) = rest.split_once('}').unwrap();
        let (a, b) = pair.split_once(',').unwrap();
        let value = value.trim().strip_prefix('=').unwrap();
        let expected = LambdaPoly::parse(&alg, value).unwrap();
        let (ga, gb) = (alg.gen(a.trim()).unwrap(), alg.gen(b.trim()).unwrap());
        assert_eq!(p.get(ga, gb), expected, "{file}: {l}");
    }
}

fn gamma_tables(m: u32) -> (Presentation, Presentation) {
    let red = sl2(m);
    let (_, table) = reduce(&red).unwrap();
    let gamma = GammaAlgebra::new(&red, &table).unwrap();
    let (p1, p2) = red.fractional_presentations();
    gamma.presentations(&red, &p1, &p2).unwrap()
}

#[test]
fn sl2_generators_m1() {
    check_generators(1);
}

#[test]
fn sl2_generators_m2() {
    check_generators(2);
}

#[test]
fn sl2_bracket_tables_m1() {
    let (g1, g2) = gamma_tables(1);
    check_table(&g1, "sl2_m1_first.txt");
    check_table(&g2, "sl2_m1_second.txt");
}

#[test]
fn sl2_bracket_tables_m2() {
    let (g1, g2) = gamma_tables(2);
    check_table(&g1, "sl2_m2_first.txt");
    check_table(&g2, "sl2_m2_second.txt");
}

#[test]
fn window_brackets_are_compatible() {
    for m in 1..=2 {
        let red = sl2(m);
        let (p1, p2) = red.fractional_presentations();
        let gens = red.gens();
        for p in [&p1, &p2] {
            assert!(check_all_pairs(p, &gens).iter().all(|r| r.pass));
            assert!(check_all_triples(p, &gens).iter().all(|r| r.pass));
        }
        assert!(check_compatibility(&p1, &p2, &gens).unwrap().iter().all(|r| r.pass));
    }
}

#[test]
fn reduced_brackets_are_compatible() {
    let (g1, g2) = gamma_tables(2);
    let gens: Vec<_> = g1.algebra().fields().collect();
    assert!(check_all_triples(&g1, &gens).iter().all(|r| r.pass));
    assert!(check_all_triples(&g2, &gens).iter().all(|r| r.pass));
    assert!(check_compatibility(&g1, &g2, &gens).unwrap().iter().all(|r| r.pass));
}

#[test]
fn sl3_minimal_symbolic_level() {
    let l = make_sl(3, Nilpotent::Minimal).unwrap();
    let red = Reduction::new(&l, 1, KValue::Symbol).unwrap();
    let (_, table) = reduce(&red).unwrap();
    assert_eq!(table.len(), 12);
    let gamma = GammaAlgebra::new(&red, &table).unwrap();
    for g in &table.gens {
        assert!(red.is_gauge_invariant(&g.gamma), "{}", g.label);
        let back = gamma.rewrite(&red, &g.gamma).unwrap();
        assert_eq!(back, gamma.var(&g.label));
    }
    // a window variable alone is not invariant, so it cannot be rewritten
    let x = DiffPoly::var(red.algebra(), red.gens()[1]);
    assert!(gamma.rewrite(&red, &x).is_err());
}

#[test]
fn principal_sl3_reduces() {
    let l = make_sl(3, Nilpotent::Principal).unwrap();
    let red = Reduction::new(&l, 1, KValue::Value(q(1))).unwrap();
    let (_, table) = reduce(&red).unwrap();
    assert_eq!(table.len(), 8 + 2);
    for g in &table.gens {
        assert!(red.is_gauge_invariant(&g.gamma), "{}", g.label);
    }
}
