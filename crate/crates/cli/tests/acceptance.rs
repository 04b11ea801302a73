//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails or exceeds its time limit.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subtori_cli::commands::bundled_corpus;
use subtori_cli::corpus::corpus_consistency;
use subtori_cli::format::parse_torus;
use subtori_core::field::fields::{gaussian, sqrt2_i};
use subtori_core::structure::core_closures;
use subtori_core::{
    census, closure, cm_check, endomorphism_algebra, hyperplane_forms, is_isogenous, lambda_invariance_check,
    line_census, product_torus, quotient_torus, rational_kernel, tau_invariant, witness_search, AlgebraicNumber,
    ComplexSubgroupSpec, ComplexTorus, EllipticCurveSpec, FieldSpec, Isogeny, Mat, RationalSubspace, Side, Slope, Q,
};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn el(k: &FieldSpec, coeffs: &[(i64, i64)]) -> AlgebraicNumber {
    k.element(coeffs.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
}

fn sqrt2(k: &FieldSpec) -> AlgebraicNumber {
    el(k, &[(0, 1), (5, 6), (0, 1), (-1, 6)])
}

fn curve(k: &FieldSpec, tau: AlgebraicNumber) -> EllipticCurveSpec {
    EllipticCurveSpec::new(k.clone(), k.from_int(1), tau).unwrap()
}

fn moser() -> ComplexTorus {
    let k = gaussian();
    product_torus(&[curve(&k, k.i()), curve(&k, k.i())]).unwrap()
}

fn mixed() -> ComplexTorus {
    let k = sqrt2_i();
    let s2i = k.mul(&sqrt2(&k), &k.i());
    product_torus(&[curve(&k, k.i()), curve(&k, s2i)]).unwrap()
}

fn corpus_tori() -> Vec<(String, ComplexTorus, bool)> {
    let mut files: Vec<_> = std::fs::read_dir(bundled_corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.ends_with("manifest.json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let (t, _) = parse_torus(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, t.torus, t.product_form.is_some())
        })
        .collect()
}

fn int_cols(cols: &[&[i64]]) -> RationalSubspace {
    let rows = cols[0].len();
    RationalSubspace::from_integer_columns(&Mat::from_cols(
        cols.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        rows,
    ))
}

fn c1_mixed_diagonal() -> Check {
    let t = mixed();
    let k = t.field().clone();
    let v = ComplexSubgroupSpec::new(k.clone(), 2, vec![vec![k.from_int(1), k.from_int(1)]]).unwrap();
    let r = closure(&t, &v).map_err(|e| e.to_string())?;
    ensure(r.real_dim == 3, format!("real_dim {}", r.real_dim))?;
    ensure(!r.is_complex, "closure reported complex")?;
    let forms: Vec<Vec<BigInt>> = r.codim_forms.row_vecs();
    let expect = vec![[1, 0, -1, 0].map(BigInt::from).to_vec()];
    ensure(forms == expect, format!("annihilator {forms:?}"))
}

fn c2_moser_claim() -> Check {
    let t = moser();
    let w = witness_search(&t, 3).map_err(|e| e.to_string())?;
    ensure(w.is_none(), format!("witness {:?}", w.map(|x| x.0)))?;
    for h in 1..=2 {
        let c = census(&t, h).map_err(|e| e.to_string())?;
        ensure(c.total == hyperplane_forms(4, h).len(), "census skipped forms")?;
        ensure(c.complex_count == c.total, format!("height {h}: {} of {} complex", c.complex_count, c.total))?;
    }
    Ok(())
}

fn c3_corpus() -> Check {
    let run = corpus_consistency(bundled_corpus(), 3).map_err(|e| e.to_string())?;
    ensure(run.members.len() >= 12, format!("{} members", run.members.len()))?;
    let with_oracle = run.members.iter().filter(|m| !m.result["oracle"].is_null()).count();
    ensure(with_oracle >= 12, format!("{with_oracle} product-form members"))?;
    for m in &run.members {
        let r = &m.result;
        ensure(r["diagnostics"]["consistent"] == true, format!("{}: inconsistent", m.file))?;
        if !r["oracle"].is_null() {
            ensure(r["oracle"] == r["condition_ii"], format!("{}: oracle disagrees", m.file))?;
        }
        ensure(r["witness"].is_null() == (r["condition_ii"] == true), format!("{}: witness vs criterion", m.file))?;
    }
    ensure(run.passed, format!("failed: {:?}", run.failed_files()))
}

fn disc(k: &FieldSpec, tau: AlgebraicNumber) -> Option<BigInt> {
    let t = tau_invariant(&curve(k, tau)).unwrap();
    cm_check(&t).discriminant
}

fn verified_isogeny(k: &FieldSpec, t1: &AlgebraicNumber, t2: &AlgebraicNumber) -> Result<bool, String> {
    let a = tau_invariant(&curve(k, t1.clone())).unwrap();
    let b = tau_invariant(&curve(k, t2.clone())).unwrap();
    match is_isogenous(&a, &b).map_err(|e| e.to_string())? {
        Isogeny::No => Ok(false),
        Isogeny::Yes { witness: [a, b, c, d] } => {
            let z = |x: &BigInt| k.from_rational(Q::from_integer(x.clone()));
            // (a τ₁ + b) = τ₂ (c τ₁ + d)
            let lhs = k.add(&k.mul(&z(&a), t1), &z(&b));
            let rhs = k.mul(t2, &k.add(&k.mul(&z(&c), t1), &z(&d)));
            ensure(lhs == rhs, "witness does not satisfy the relation")?;
            ensure(&a * &d - &b * &c != BigInt::zero(), "witness is singular")?;
            Ok(true)
        }
    }
}

fn c4_cm_table() -> Check {
    let g = gaussian();
    let k = sqrt2_i();
    let s2i = k.mul(&sqrt2(&k), &k.i());
    ensure(disc(&g, g.i()) == Some((-4).into()), "τ = i")?;
    ensure(disc(&k, s2i.clone()) == Some((-8).into()), "τ = √2 i")?;
    ensure(disc(&k, k.theta()).is_none(), "τ = √2 + i")?;
    ensure(verified_isogeny(&g, &g.i(), &g.mul(&g.from_int(2), &g.i()))?, "(i, 2i)")?;
    ensure(!verified_isogeny(&k, &k.i(), &s2i)?, "(i, √2 i)")?;
    let half = k.scale(&k.add(&k.from_int(1), &s2i), &q(1, 2));
    let col = Mat::from_cols(vec![vec![k.neg(&s2i), k.from_int(-1), k.mul(&s2i, &half), half.clone()]], 4);
    let kernel = rational_kernel(&k, &col, Side::Left);
    ensure(kernel.rows() == 2, format!("relation space of dimension {}", kernel.rows()))?;
    ensure(verified_isogeny(&k, &s2i, &half)?, "(√2 i, (1 + √2 i)/2)")
}

type R64 = Ratio<i64>;

/// Dimension of `{M : M Jₖ = Jₖ M for all k}` by plain Gaussian elimination.
fn commutant_dim(js: &[[[R64; 4]; 4]]) -> usize {
    let mut rows: Vec<Vec<R64>> = Vec::new();
    for j in js {
        for r in 0..4 {
            for c in 0..4 {
                // (MJ − JM)[r][c] in the unknowns M[a][b] = x[4a + b]
                let mut eq = vec![R64::zero(); 16];
                for s in 0..4 {
                    eq[4 * r + s] += j[s][c];
                    eq[4 * s + c] -= j[r][s];
                }
                rows.push(eq);
            }
        }
    }
    let mut rank = 0;
    for col in 0..16 {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = R64::one() / rows[rank][col];
        let pivot: Vec<R64> = rows[rank].iter().map(|x| x * inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col];
                row.iter_mut().zip(&pivot).for_each(|(x, p)| *x -= f * p);
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    16 - rank
}

fn r(n: i64, d: i64) -> R64 {
    R64::new(n, d)
}

fn c5_end_dims() -> Check {
    let z = r(0, 1);
    let rot = |a: R64, b: R64| [[z, -a], [b, z]];
    let block = |x: [[R64; 2]; 2], y: [[R64; 2]; 2]| {
        let mut m = [[z; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = x[i][j];
                m[i + 2][j + 2] = y[i][j];
            }
        }
        m
    };
    let zero2 = [[z; 2]; 2];
    // multiplication by i on the lattice bases (1, i, 0, 0), … written out by hand
    let moser_j = block(rot(r(1, 1), r(1, 1)), rot(r(1, 1), r(1, 1)));
    // mixed: J = J₀ + √2 J₁ with J₀, J₁ rational
    let mixed_j0 = block(rot(r(1, 1), r(1, 1)), zero2);
    let mixed_j1 = block(zero2, rot(r(1, 1), r(1, 2)));
    const MOSER_GOLDEN: usize = 8;
    const MIXED_GOLDEN: usize = 4;
    ensure(commutant_dim(&[moser_j]) == MOSER_GOLDEN, "oracle disagrees with the golden Moser value")?;
    ensure(commutant_dim(&[mixed_j0, mixed_j1]) == MIXED_GOLDEN, "oracle disagrees with the golden mixed value")?;

    let to_field = |k: &FieldSpec, m: &[[R64; 4]; 4], scale: &AlgebraicNumber| -> Vec<AlgebraicNumber> {
        m.iter().flatten().map(|x| k.mul(scale, &k.from_rational(q(*x.numer(), *x.denom())))).collect()
    };
    let t = moser();
    let k = t.field().clone();
    ensure(t.j().entries() == to_field(&k, &moser_j, &k.from_int(1)).as_slice(), "Moser J differs from the hand-coded one")?;
    let t2 = mixed();
    let k2 = t2.field().clone();
    let hand: Vec<AlgebraicNumber> = to_field(&k2, &mixed_j0, &k2.from_int(1))
        .iter()
        .zip(to_field(&k2, &mixed_j1, &sqrt2(&k2)))
        .map(|(a, b)| k2.add(a, &b))
        .collect();
    ensure(t2.j().entries() == hand.as_slice(), "mixed J differs from the hand-coded one")?;

    let m = endomorphism_algebra(&t).dim;
    ensure(m == MOSER_GOLDEN && m == 2 * t.n() * t.n(), format!("Moser end_dim {m}"))?;
    let m = endomorphism_algebra(&t2).dim;
    ensure(m == MIXED_GOLDEN, format!("mixed end_dim {m}"))
}

fn c6_dichotomy() -> Check {
    for (name, t, _) in corpus_tori() {
        let n = t.n();
        let c = census(&t, 2).map_err(|e| e.to_string())?;
        ensure(c.dichotomy_holds(n), format!("{name}: outcomes {:?}", c.outcomes))?;
        ensure(c.outcomes.values().sum::<usize>() == c.total, format!("{name}: outcome counts"))?;
        if n == 2 {
            // full engine on every core, not the census fast path
            for (f, res) in core_closures(&t, 2).map_err(|e| e.to_string())? {
                let d = res.real_dim;
                ensure(
                    (res.is_complex && d == 2 * n - 2) || (!res.is_complex && d == 2 * n - 1),
                    format!("{name}: form {:?} closes to dimension {d}", f.entries()),
                )?;
            }
        }
    }
    Ok(())
}

fn random_gaussian(k: &FieldSpec, rng: &mut ChaCha8Rng) -> AlgebraicNumber {
    let a = k.from_int(rng.gen_range(-3..=3));
    let b = k.from_int(rng.gen_range(-3..=3));
    k.add(&a, &k.mul(&b, &k.i()))
}

fn c7_lambda_invariance() -> Check {
    let t = moser();
    let k = t.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 50 {
        let dim = rng.gen_range(1..=2);
        let basis: Vec<Vec<AlgebraicNumber>> = (0..dim).map(|_| vec![random_gaussian(&k, &mut rng), random_gaussian(&k, &mut rng)]).collect();
        let Ok(v) = ComplexSubgroupSpec::new(k.clone(), 2, basis) else { continue };
        ensure(lambda_invariance_check(&t, &v, &k.i()).map_err(|e| e.to_string())?, format!("subgroup {done} not i-invariant"))?;
        let w = closure(&t, &v).map_err(|e| e.to_string())?.w;
        // hand-coded J applied to each basis column
        for col in w.basis().col_vecs() {
            let jx = [-&col[1], col[0].clone(), -&col[3], col[2].clone()];
            ensure(w.contains(&jx.map(Q::from_integer)), format!("subgroup {done}: J·W ⊄ W"))?;
        }
        done += 1;
    }
    let m = mixed();
    let km = m.field().clone();
    let v = ComplexSubgroupSpec::new(km.clone(), 2, vec![vec![km.from_int(1), km.from_int(1)]]).unwrap();
    match lambda_invariance_check(&m, &v, &km.i()) {
        Err(e) if e.code() == "not_rational_endomorphism" => Ok(()),
        other => Err(format!("mixed λ = i gave {other:?}")),
    }
}

fn c8_quotients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for (name, t, is_product) in corpus_tori() {
        if !is_product || t.n() != 3 {
            continue;
        }
        let k = t.field().clone();
        let e = |j: usize| {
            let mut v = [0i64; 6];
            v[j] = 1;
            v
        };
        let (a, b, c, d, f, g) = (e(0), e(1), e(2), e(3), e(4), e(5));
        let diag12: ([i64; 6], [i64; 6]) = ([1, 0, 1, 0, 0, 0], [0, 1, 0, 1, 0, 0]);
        let mut subtori = vec![int_cols(&[&a, &b]), int_cols(&[&c, &d]), int_cols(&[&f, &g])];
        let diag = int_cols(&[&diag12.0, &diag12.1]);
        if subtori_core::is_complex_subspace(&t, &diag).map_err(|e| e.to_string())? {
            subtori.push(diag);
        }
        for s in &subtori {
            let qt = quotient_torus(&t, s).map_err(|e| format!("{name}: {e}"))?;
            ensure(qt.torus.n() == 2, format!("{name}: quotient of dimension {}", qt.torus.n()))?;
            for _ in 0..10 {
                let line = loop {
                    let x = vec![random_gaussian(&k, &mut rng), random_gaussian(&k, &mut rng)];
                    if let Ok(v) = ComplexSubgroupSpec::new(k.clone(), 2, vec![x]) {
                        break v;
                    }
                };
                let up = qt.pullback_subgroup(&line).map_err(|e| e.to_string())?;
                let lhs = closure(&t, &up).map_err(|e| e.to_string())?.w;
                let rhs = qt.pullback(&closure(&qt.torus, &line).map_err(|e| e.to_string())?.w);
                ensure(lhs == rhs, format!("{name}: closure of pullback differs from pullback of closure"))?;
                checked += 1;
            }
        }
    }
    ensure(checked >= 60, format!("only {checked} line checks ran"))
}

fn c9_line_census() -> Check {
    let k = sqrt2_i();
    let tau = k.theta();
    let e = curve(&k, tau.clone());
    let b = product_torus(&[e.clone(), e]).unwrap();
    let rationals = [(0, 1), (1, 1), (2, 1), (1, 2), (-1, 1)];
    let mut slopes: Vec<Slope> = rationals.iter().map(|&(a, d)| Slope::Finite(k.from_rational(q(a, d)))).collect();
    slopes.push(Slope::Finite(tau.clone()));
    slopes.push(Slope::Finite(k.scale(&k.mul(&tau, &tau), &q(1, 2))));
    let got = line_census(&b, &slopes).map_err(|e| e.to_string())?;
    let flags: Vec<bool> = got.iter().map(|v| v.is_subtorus).collect();
    ensure(flags == [true, true, true, true, true, false, false], format!("subtorus flags {flags:?}"))?;
    // τ² = −3 + 2√2 τ, so on z₂ = τz₁ the lattice coordinates satisfy a₂ + 3b₁ = 0
    let dims: Vec<usize> = got.iter().map(|v| v.real_dim).collect();
    ensure(dims == [2, 2, 2, 2, 2, 3, 4], format!("closure dimensions {dims:?}"))
}

fn main() {
    // (label, limit, check)
    let criteria: [(&str, u64, fn() -> Check); 9] = [
        ("mixed torus, diagonal closure", 1, c1_mixed_diagonal),
        ("Moser torus, no witness and complex census", 10, c2_moser_claim),
        ("corpus consistency at height 3", 60, c3_corpus),
        ("CM and isogeny table", 1, c4_cm_table),
        ("endomorphism dimensions against oracle", 5, c5_end_dims),
        ("closure dichotomy at height 2", 30, c6_dichotomy),
        ("i-invariance on Moser subgroups", 10, c7_lambda_invariance),
        ("quotient and pullback commute", 30, c8_quotients),
        ("non-CM line census", 5, c9_line_census),
    ];
    let mut failed = 0;
    for (idx, (label, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let took = start.elapsed();
        let res = res.and_then(|()| ensure(took <= Duration::from_secs(*limit), format!("exceeded {limit} s")));
        let status = if res.is_ok() { "PASS" } else { "FAIL" };
        let detail = res.err().map(|e| format!(": {e}")).unwrap_or_default();
        println!("criterion {} {status} {label} ({:.3} s, limit {limit} s){detail}", idx + 1, took.as_secs_f64());
        failed += usize::from(status == "FAIL");
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
