//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fpi_cli::parser::BinOp;
use fpi_cli::{CliError, Expr, ExprKind, Session, Value};
use fpi_core::{
    Error, FqElem, FqField, Mode, Monomial, MultiPoly, PerfElem, PerfectClosure, RatFunc, UniPoly,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_poly(rng: &mut ChaCha8Rng, c: &PerfectClosure, max_deg: u64) -> MultiPoly {
    let n = rng.gen_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            let mut budget = rng.gen_range(0..=max_deg);
            let exps = (0..c.nvars())
                .map(|_| {
                    let e = rng.gen_range(0..=budget);
                    budget -= e;
                    e
                })
                .collect();
            (Monomial::new(exps), rng.gen_range(1..c.p()))
        })
        .collect();
    MultiPoly::from_terms(c.field(), c.nvars(), terms)
}

/// Random element of level at most 3 whose body has total degree at most
/// `max_deg` in numerator and denominator.
fn random_elem(rng: &mut ChaCha8Rng, c: &PerfectClosure, max_deg: u64) -> PerfElem {
    loop {
        let den = random_poly(rng, c, max_deg);
        if den.is_zero() {
            continue;
        }
        let body = RatFunc::new(random_poly(rng, c, max_deg), den).expect("nonzero denominator");
        return c
            .canonicalize(rng.gen_range(0..=3), body)
            .expect("small level");
    }
}

fn random_monic(rng: &mut ChaCha8Rng, c: &PerfectClosure, mode: Mode, deg: usize) -> UniPoly {
    let max_level = if mode == Mode::Perfect { 1 } else { 0 };
    let mut coeffs: Vec<PerfElem> = (0..deg)
        .map(|_| {
            let body = RatFunc::from_poly(random_poly(rng, c, 1));
            let body = if rng.gen_bool(0.3) {
                RatFunc::zero(c.field(), c.nvars())
            } else {
                body
            };
            c.canonicalize(rng.gen_range(0..=max_level), body).unwrap()
        })
        .collect();
    coeffs.push(c.one());
    UniPoly::new(*c, mode, coeffs).unwrap()
}

fn random_product(rng: &mut ChaCha8Rng, c: &PerfectClosure, mode: Mode) -> UniPoly {
    let mut f = UniPoly::constant(*c, mode, c.constant(rng.gen_range(1..c.p() as i64))).unwrap();
    for _ in 0..rng.gen_range(1..=3) {
        let deg = rng.gen_range(1..=2);
        let g = random_monic(rng, c, mode, deg);
        let m = if rng.gen_bool(0.3) {
            c.p() as u64
        } else {
            rng.gen_range(1..=3)
        };
        f = f.mul(&g.pow(m).unwrap()).unwrap();
    }
    if rng.gen_bool(0.25) {
        f = f.compose_power(c.p() as usize);
    }
    f
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x01);
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        for d in 1..=3 {
            let c = PerfectClosure::new(p, d).unwrap();
            for _ in 0..120 {
                let a = random_elem(&mut rng, &c, 6);
                let b = random_elem(&mut rng, &c, 6);
                let fa = c.frobenius(&a).map_err(|e| e.to_string())?;
                let ra = c.pth_root(&a).map_err(|e| e.to_string())?;
                ensure!(
                    fa.is_canonical() && ra.is_canonical(),
                    "non-canonical output for {a}"
                );
                ensure!(c.frobenius(&ra).unwrap() == a, "Frob(root(a)) != a for {a}");
                ensure!(c.pth_root(&fa).unwrap() == a, "root(Frob(a)) != a for {a}");
                ensure!(c.pow(&a, p as i64).unwrap() == fa, "Frob(a) != a^p for {a}");
                let fb = c.frobenius(&b).unwrap();
                let sum = c.frobenius(&c.add(&a, &b).unwrap()).unwrap();
                ensure!(
                    sum == c.add(&fa, &fb).unwrap(),
                    "Frob not additive on {a}, {b}"
                );
                let prod = c.frobenius(&c.mul(&a, &b).unwrap()).unwrap();
                ensure!(
                    prod == c.mul(&fa, &fb).unwrap(),
                    "Frob not multiplicative on {a}, {b}"
                );
                ensure!((a == b) == (fa == fb), "Frob not injective on {a}, {b}");
                checked += 2;
            }
        }
    }
    Ok(format!(
        "{checked} elements over p in {{2,3,5}}, d in {{1,2,3}}"
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x02);
    let mut checked = 0;
    for i in 0..600 {
        let c = PerfectClosure::new([2, 3, 5][i % 3], 1 + i % 3).unwrap();
        let a = random_elem(&mut rng, &c, 4);
        for k in 0..=3 {
            let form = c.lift(&a, a.level() + k).map_err(|e| e.to_string())?;
            ensure!(
                form.level == a.level() + k,
                "lift landed on level {}",
                form.level
            );
            ensure!(
                c.canonicalize_form(form).unwrap() == a,
                "lift/canonicalize changed {a} (k = {k})"
            );
            checked += 1;
        }
        if a.level() > 0 {
            let err = c.lift(&a, a.level() - 1).unwrap_err();
            ensure!(
                matches!(err, Error::LevelTooLow { .. }),
                "lift below level gave {err:?}"
            );
        }
    }
    Ok(format!("{checked} lift/canonicalize round trips, k <= 3"))
}

fn criterion_3() -> Outcome {
    for p in [2u64, 3, 5] {
        let mut s = Session::new(p, 2, Mode::Level0, 64).unwrap();
        let poly = format!("t^{p} - x1");
        for line in ["eval root(x1,1)".to_string(), format!("prootpoly {poly}")] {
            let err = s.run_command(&line).unwrap_err();
            ensure!(
                err.algebra() == Some(&Error::NotPerfectMode),
                "level0 `{line}` gave {err}"
            );
        }
        s.set_mode(Mode::Perfect);
        let root = s
            .run_command(&format!("prootpoly {poly}"))
            .map_err(|e| e.to_string())?
            .unwrap();
        let expected = if p == 2 {
            "t + root(x1,1)".to_string()
        } else {
            format!("t + {}*root(x1,1)", p - 1)
        };
        ensure!(root == expected, "prootpoly gave {root} for p = {p}");
        let back = s
            .eval_str(&format!("({root})^{p} - ({poly})"))
            .map_err(|e| e.to_string())?;
        ensure!(
            back.to_string() == "0",
            "root^p differs from input by {back}"
        );
    }
    Ok("level0 refuses p-th roots; perfect mode roots t^p - x1 exactly".to_string())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x04);
    let mut checked = 0;
    for i in 0..520 {
        let c = PerfectClosure::new([2, 3][i % 2], 2).unwrap();
        let mode = if i % 4 < 2 {
            Mode::Perfect
        } else {
            Mode::Level0
        };
        let f = random_product(&mut rng, &c, mode);
        let sep = f
            .separable_decomposition()
            .map_err(|e| format!("sepdec({f}): {e}"))?;
        ensure!(sep.reassemble() == f, "s(t^(p^e)) != f for {f}");
        ensure!(
            !sep.s.derivative().unwrap().is_zero(),
            "s has zero derivative for {f}"
        );
        if mode == Mode::Perfect {
            let sqf = f
                .squarefree_decomposition()
                .map_err(|e| format!("sqfree({f}): {e}"))?;
            ensure!(
                sqf.reassemble().unwrap() == f,
                "squarefree parts do not multiply to {f}"
            );
            for (j, (g, m)) in sqf.parts.iter().enumerate() {
                ensure!(
                    g.is_separable().unwrap(),
                    "part {g} of {f} is not separable"
                );
                for (h, n) in &sqf.parts[j + 1..] {
                    ensure!(m != n, "repeated multiplicity in decomposition of {f}");
                    ensure!(
                        g.gcd(h).unwrap().is_one(),
                        "parts {g} and {h} share a factor"
                    );
                }
            }
            checked += 1;
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} decompositions reassembled over p in {{2,3}}"
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut fields = 0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        let mut n = 1u32;
        while p.pow(n) <= 1 << 16 {
            let f = FqField::new(p, n).map_err(|e| e.to_string())?;
            let r = f.check_perfect().map_err(|e| e.to_string())?;
            ensure!(r.passed() && r.order == n as u64, "F_{p}^{n}: {r}");
            fields += 1;
            n += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!(
        "{fields} fields checked in {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn random_expr(rng: &mut ChaCha8Rng, d: usize, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.75) {
            format!("x{}", rng.gen_range(1..=d))
        } else {
            rng.gen_range(1..20).to_string()
        };
    }
    match rng.gen_range(0..6) {
        0 => format!(
            "({} + {})",
            random_expr(rng, d, depth - 1),
            random_expr(rng, d, depth - 1)
        ),
        1 => format!(
            "({} - {})",
            random_expr(rng, d, depth - 1),
            random_expr(rng, d, depth - 1)
        ),
        2 => format!(
            "{}*{}",
            random_expr(rng, d, depth - 1),
            random_expr(rng, d, depth - 1)
        ),
        3 => format!(
            "{}/({})",
            random_expr(rng, d, depth - 1),
            random_expr(rng, d, depth - 1)
        ),
        4 => format!(
            "({})^{}",
            random_expr(rng, d, depth - 1),
            rng.gen_range(-2..=3)
        ),
        _ => format!(
            "root({}, {})",
            random_expr(rng, d, depth - 1),
            rng.gen_range(1..=2)
        ),
    }
}

/// Evaluates an expression directly in a finite field: variables go to
/// `point`, roots are inverse Frobenius.
fn eval_in(field: &FqField, point: &[FqElem], e: &Expr) -> Option<FqElem> {
    Some(match &e.kind {
        ExprKind::Int(s) => field.constant((s.parse::<u64>().ok()? % field.p() as u64) as u32),
        ExprKind::Var(i) => point[*i].clone(),
        ExprKind::Neg(a) => -eval_in(field, point, a)?,
        ExprKind::Binary(op, a, b) => {
            let (x, y) = (eval_in(field, point, a)?, eval_in(field, point, b)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x.div(&y).ok()?,
            }
        }
        ExprKind::Pow(a, k) => {
            let x = eval_in(field, point, a)?;
            let x = if *k < 0 { x.inv().ok()? } else { x };
            x.pow(k.unsigned_abs())
        }
        ExprKind::Root(a, k) => (0..*k).fold(eval_in(field, point, a)?, |x, _| x.inv_frobenius()),
        ExprKind::T | ExprKind::Binding(_) => return None,
    })
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    let mut identities = 0;
    let mut attempts = 0;
    let mut fields: HashMap<u64, FqField> = HashMap::new();
    while identities < 240 {
        attempts += 1;
        ensure!(
            attempts < 5000,
            "only {identities} identities after {attempts} attempts"
        );
        let p = [2u64, 3, 5][attempts % 3];
        let d = 1 + attempts % 3;
        let s = Session::new(p, d, Mode::Perfect, 64).unwrap();
        let (a, b, cc) = (
            random_expr(&mut rng, d, 2),
            random_expr(&mut rng, d, 2),
            random_expr(&mut rng, d, 2),
        );
        let k = rng.gen_range(1..=2);
        let (lhs, rhs) = match attempts % 6 {
            0 => (format!("({a} + {b})^{p}"), format!("({a})^{p} + ({b})^{p}")),
            1 => (
                format!("root(({a})*({b}), {k})"),
                format!("root({a}, {k})*root({b}, {k})"),
            ),
            2 => (
                format!("({a})*(({b}) + ({cc}))"),
                format!("({a})*({b}) + ({a})*({cc})"),
            ),
            3 => (format!("root({a}, 1)^{p}"), a.clone()),
            4 => (format!("(({a})/({b}))*({b})"), a.clone()),
            _ => (
                format!("root(({a}) - ({b}), {k})"),
                format!("root({a}, {k}) - root({b}, {k})"),
            ),
        };
        let (Ok(Value::Elem(l)), Ok(Value::Elem(r))) = (s.eval_str(&lhs), s.eval_str(&rhs)) else {
            continue;
        };
        ensure!(l == r, "{lhs} = {l} but {rhs} = {r} (p = {p})");
        let field = fields
            .entry(p)
            .or_insert_with(|| FqField::new(p, 6).unwrap())
            .clone();
        let (le, re) = (s.parse(&lhs).unwrap(), s.parse(&rhs).unwrap());
        let mut points = 0;
        let mut tries = 0;
        while points < 5 {
            tries += 1;
            ensure!(tries < 200, "no pole-free points for {lhs}");
            let point: Vec<FqElem> = (0..d)
                .map(|_| field.element(rng.gen_range(0..field.size())))
                .collect();
            let (Some(x), Some(y)) = (eval_in(&field, &point, &le), eval_in(&field, &point, &re))
            else {
                continue;
            };
            let Ok(z) = s.context().eval(&l, &point) else {
                continue;
            };
            ensure!(
                x == y && y == z,
                "{lhs} vs {rhs} disagree at {point:?}: {x}, {y}, {z}"
            );
            points += 1;
        }
        identities += 1;
    }
    Ok(format!(
        "{identities} identities, each at 5 points of F_p^6"
    ))
}

fn structured(err: &CliError, input: &str) -> bool {
    err.offset().is_none_or(|o| o <= input.len()) && !err.to_string().is_empty()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x07);
    let prev = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut s = Session::new(3, 3, Mode::Perfect, 64).unwrap();
    let alphabet: &[&str] = &[
        "x1",
        "x2",
        "x4",
        "t",
        "root(",
        ",",
        "(",
        ")",
        "+",
        "-",
        "*",
        "/",
        "^",
        "2",
        "3",
        "-1",
        " ",
        "eval ",
        "let a = ",
        "a",
        "sepdec ",
        "fq frob 2 3 ",
        "0",
    ];
    let mut failure = None;
    for i in 0..100_000 {
        let input = if i % 2 == 0 {
            let len = rng.gen_range(0..48);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            (0..rng.gen_range(1..12))
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect()
        };
        match panic::catch_unwind(AssertUnwindSafe(|| s.run_command(&input))) {
            Ok(Ok(_)) => {}
            Ok(Err(e)) if structured(&e, &input) => {}
            Ok(Err(e)) => failure = Some(format!("unstructured error {e:?} for {input:?}")),
            Err(_) => failure = Some(format!("panic on {input:?}")),
        }
        if failure.is_some() {
            break;
        }
    }
    panic::set_hook(prev);
    if let Some(f) = failure {
        return Err(f);
    }
    let mut roundtrips = 0;
    for i in 0..1000 {
        let p = [2u64, 3, 5][i % 3];
        let c = PerfectClosure::new(p, 3).unwrap();
        let s = Session::new(p, 3, Mode::Perfect, 64).unwrap();
        let v = if i % 4 == 0 {
            Value::Poly(random_product(&mut rng, &c, Mode::Perfect))
        } else {
            Value::Elem(random_elem(&mut rng, &c, 6))
        };
        let text = v.to_string();
        let back = s.eval_str(&text).map_err(|e| format!("{text}: {e}"))?;
        let same = match (&v, &back) {
            (Value::Poly(f), Value::Elem(e)) => f.is_constant() && f.coeff(0) == *e,
            _ => back == v,
        };
        ensure!(same, "{text} reparsed as {back}");
        roundtrips += 1;
    }
    Ok(format!(
        "100000 fuzz inputs without panics, {roundtrips} print/parse round trips"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (
            "Frobenius is an automorphism of the perfect closure",
            criterion_1,
        ),
        ("lift followed by canonicalize is the identity", criterion_2),
        (
            "level0 mode refuses p-th roots, perfect mode computes them",
            criterion_3,
        ),
        (
            "squarefree and separable decompositions reassemble",
            criterion_4,
        ),
        ("every small finite field is perfect", criterion_5),
        (
            "random identities hold exactly and under evaluation",
            criterion_6,
        ),
        ("parser is total and printing round trips", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
