use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use num_rational::BigRational;
use quasishift::decomposition::{admissible_factorization, ProductShift};
use quasishift::interval::{self, DigitReal};
use quasishift::oracle::{self, AVector, IdempotentSearch};
use quasishift::quasigroup::{
    build_idempotent_quasigroup, build_translation_quasigroup, FiniteQuasigroup, LatinSquare,
    Permutation,
};
use quasishift::symbolic::{PeriodicPoint, RotorShiftSystem};
use quasishift::Error;
use serde_json::{json, Value};

use crate::report::Report;
use crate::{DecomposeArgs, IntervalCmd, LatinCmd, OpChoice, OracleCmd, ShiftCmd, SystemArgs};

pub type CmdResult = Result<Report, Box<dyn StdError>>;

fn read_square(path: &Path) -> Result<LatinSquare, Box<dyn StdError>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(text.parse::<LatinSquare>()?)
}

fn is_latin(sq: &LatinSquare) -> bool {
    LatinSquare::from_rows(&sq.rows()).is_ok()
}

fn quasigroup_checks(report: &mut Report, q: &FiniteQuasigroup) {
    report.check("rows and columns are permutations", is_latin(q.square()));
    if q.is_idempotent() {
        report.check("x * x = x", q.square().is_idempotent());
    }
    if let Some(s) = q.automorphic_translation() {
        report.check(
            "x -> x+1 is an automorphism (all pairs)",
            q.is_automorphism(s).unwrap_or(false),
        );
    }
}

pub fn latin(cmd: LatinCmd) -> CmdResult {
    match cmd {
        LatinCmd::BuildTranslation { n } => {
            let q = build_translation_quasigroup(n)?;
            let mut r = Report::new(format!("latin build-translation {n}"), json!({ "n": n }));
            r.outputs = serde_json::to_value(&q)?;
            quasigroup_checks(&mut r, &q);
            Ok(r)
        }
        LatinCmd::BuildIdempotent { n } => {
            let q = build_idempotent_quasigroup(n)?;
            let mut r = Report::new(format!("latin build-idempotent {n}"), json!({ "n": n }));
            r.outputs = serde_json::to_value(&q)?;
            quasigroup_checks(&mut r, &q);
            Ok(r)
        }
        LatinCmd::Verify { file } => {
            let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let mut r = Report::new(
                format!("latin verify {}", file.display()),
                json!({ "file": file.display().to_string() }),
            );
            match text.parse::<LatinSquare>() {
                Ok(sq) => {
                    let q = FiniteQuasigroup::new(sq.clone());
                    let n = sq.order();
                    r.outputs = json!({
                        "order": n,
                        "table": sq.rows(),
                        "idempotent": sq.is_idempotent(),
                        "translation_automorphism": q.is_automorphism(&Permutation::cyclic_shift(n))?,
                    });
                    r.check("rows and columns are permutations", true);
                }
                Err(
                    e @ (Error::RowNotPermutation(_)
                    | Error::ColumnNotPermutation(_)
                    | Error::NotSquare { .. }),
                ) => {
                    r.outputs = json!({ "violation": e.to_string() });
                    r.check("rows and columns are permutations", false);
                }
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
    }
}

pub fn oracle(cmd: OracleCmd) -> CmdResult {
    match cmd {
        OracleCmd::Automorphic { n, list } => {
            let res = oracle::enumerate_automorphic(n, list)?;
            let mut r = Report::new(
                format!("oracle automorphic {n}"),
                json!({ "n": n, "list": list }),
            );
            r.check(
                "count is zero exactly when n is even",
                (res.latin_count == 0) == (n % 2 == 0),
            );
            r.outputs = json!({ "n": n, "result": res });
            Ok(r)
        }
        OracleCmd::LatinCount { n } => {
            let count = oracle::count_latin_squares(n)?;
            let mut r = Report::new(format!("oracle latin-count {n}"), json!({ "n": n }));
            r.outputs = json!({ "n": n, "result": count });
            Ok(r)
        }
        OracleCmd::Idempotent { n } => {
            let res = oracle::search_idempotent(n)?;
            let mut r = Report::new(format!("oracle idempotent {n}"), json!({ "n": n }));
            match &res {
                IdempotentSearch::Found { square, .. } => {
                    r.check("rows and columns are permutations", is_latin(square));
                    r.check("x * x = x", square.is_idempotent());
                }
                IdempotentSearch::Nonexistent(cert) => {
                    r.check(
                        "search tree exhausted",
                        cert.n == n && cert.nodes_explored > 0,
                    );
                }
            }
            r.outputs = json!({ "n": n, "result": res });
            Ok(r)
        }
        OracleCmd::Sums {
            n,
            a,
            samples,
            seed,
        } => {
            let mut r = Report::new(
                format!("oracle sums {n}"),
                json!({ "n": n, "a": a, "samples": samples }),
            );
            let vectors = match a {
                Some(entries) => vec![AVector::new(entries)?],
                None => {
                    r.seed = Some(seed);
                    AVector::random_distinct(n, samples, seed)?
                }
            };
            if vectors.iter().any(|v| v.order() != n) {
                return Err(format!("--a must have exactly {n} entries").into());
            }
            let reports = vectors
                .iter()
                .map(oracle::sum_contradiction_report)
                .collect::<Result<Vec<_>, _>>()?;
            r.check(
                "row sums equal n/2 and column sums equal 0",
                reports.iter().all(|s| s.row_sum == n / 2 && s.col_sum == 0),
            );
            r.check(
                "row sum differs from column sum",
                reports.iter().all(|s| s.contradiction),
            );
            r.outputs = json!({ "n": n, "result": reports });
            Ok(r)
        }
    }
}

fn build_system(args: &SystemArgs) -> Result<RotorShiftSystem, Box<dyn StdError>> {
    let sys = match &args.base_op {
        Some(path) => {
            let q = FiniteQuasigroup::new(read_square(path)?);
            if q.order() != args.alphabet {
                return Err(format!(
                    "base op has order {} but --alphabet is {}",
                    q.order(),
                    args.alphabet
                )
                .into());
            }
            RotorShiftSystem::new(q, args.rotor_size)?
        }
        None => RotorShiftSystem::with_default_op(args.alphabet, args.rotor_size)?,
    };
    Ok(sys)
}

fn system_json(sys: &RotorShiftSystem) -> Value {
    json!({
        "alphabet": sys.alphabet_size(),
        "rotor_size": sys.rotor_size(),
        "rotor_lambda": sys.rotor_lambda(),
        "base_op": sys.base_op().square().rows(),
    })
}

pub fn shift(cmd: ShiftCmd) -> CmdResult {
    match cmd {
        ShiftCmd::Info { system } => {
            let sys = build_system(&system)?;
            let mut r = Report::new("shift info", system_json(&sys));
            r.outputs = json!({
                "entropy_nats": sys.entropy(),
                "ergodic_period": sys.ergodic_period(),
            });
            Ok(r)
        }
        ShiftCmd::Op {
            system,
            u,
            u_rotor,
            v,
            v_rotor,
        } => {
            let sys = build_system(&system)?;
            let u = sys.point(PeriodicPoint::parse(sys.alphabet_size(), &u)?, u_rotor)?;
            let v = sys.point(PeriodicPoint::parse(sys.alphabet_size(), &v)?, v_rotor)?;
            let w = sys.op_canonical(&u, &v)?;
            let lhs = sys.system_map(&w)?;
            let rhs = sys.op_canonical(&sys.system_map(&u)?, &sys.system_map(&v)?)?;
            let mut r = Report::new(
                "shift op",
                json!({ "system": system_json(&sys), "u": u, "v": v }),
            );
            r.check("S(u * v) = S(u) * S(v)", lhs == rhs);
            r.outputs = json!({
                "product": w,
                "S(u*v)": lhs,
                "S(u)*S(v)": rhs,
            });
            Ok(r)
        }
        ShiftCmd::CheckAutomorphism {
            system,
            trials,
            seed,
            max_period,
            exhaustive,
        } => {
            let sys = build_system(&system)?;
            let random = sys.check_automorphism_random(trials, seed, max_period)?;
            let mut r = Report::new(
                "shift check-automorphism",
                json!({
                    "system": system_json(&sys),
                    "trials": trials,
                    "max_period": max_period,
                    "exhaustive": exhaustive,
                }),
            );
            r.seed = Some(seed);
            r.check("random pairs: S(u * v) = S(u) * S(v)", random.passed());
            let mut outputs = json!({ "random": random });
            if let Some(p) = exhaustive {
                let full = sys.check_automorphism_exhaustive(p);
                r.check("all small pairs: S(u * v) = S(u) * S(v)", full.passed());
                outputs["exhaustive"] = serde_json::to_value(full)?;
            }
            r.outputs = outputs;
            Ok(r)
        }
    }
}

pub fn factorize(n: u64, nontrivial: bool) -> CmdResult {
    let fs = admissible_factorization(n, nontrivial)?;
    let mut r = Report::new(
        format!(
            "factorize {n}{}",
            if nontrivial { " --nontrivial" } else { "" }
        ),
        json!({ "n": n, "nontrivial": nontrivial }),
    );
    r.outputs = json!({ "factorizations": fs });
    Ok(r)
}

pub fn decompose(args: DecomposeArgs) -> CmdResult {
    let y = ProductShift::for_factors(&args.factors)?;
    let digits: Vec<Vec<usize>> =
        serde_json::from_str(&args.point).map_err(|e| format!("--point: {e}"))?;
    let x = y.point_from_digits(digits)?;
    let sections = match &args.bases {
        None => y.default_sections(),
        Some(text) => {
            let bases: Vec<Vec<Vec<usize>>> =
                serde_json::from_str(text).map_err(|e| format!("--bases: {e}"))?;
            if bases.len() != y.arity() {
                return Err(
                    format!("--bases needs {} entries, one per coordinate", y.arity()).into(),
                );
            }
            let sizes = y.alphabet_sizes();
            bases
                .into_iter()
                .enumerate()
                .map(|(k, zs)| {
                    let js = (0..y.arity()).filter(|&j| j != k);
                    if zs.len() != y.arity() - 1 {
                        return Err(Error::ArityMismatch {
                            expected: y.arity() - 1,
                            found: zs.len(),
                        });
                    }
                    let points = js
                        .zip(zs)
                        .map(|(j, d)| PeriodicPoint::new(sizes[j], d))
                        .collect::<Result<Vec<_>, _>>()?;
                    y.make_section(k, points)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let parts = y.decompose(&x, &sections)?;
    let rebuilt = y.right_nested_product(&parts)?;
    let digits_of = |p: &quasishift::decomposition::ProductPoint| -> Vec<Vec<usize>> {
        p.components().iter().map(|c| c.digits().to_vec()).collect()
    };
    let mut r = Report::new(
        "decompose",
        json!({ "factors": args.factors, "point": digits_of(&x), "sections": sections }),
    );
    r.check("x_1 * (x_2 * (...)) reconstructs the point", rebuilt == x);
    r.check(
        "each part lies in its section",
        sections.iter().zip(&parts).all(|(s, p)| s.contains(p)),
    );
    r.outputs = json!({
        "components": parts.iter().map(digits_of).collect::<Vec<_>>(),
        "reconstruction": digits_of(&rebuilt),
    });
    Ok(r)
}

fn parse_rational(s: &str) -> Result<BigRational, Box<dyn StdError>> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| format!("invalid rational {s:?}: {e}").into())
}

fn digit_json(d: &DigitReal) -> Value {
    json!({
        "digits": d.to_string(),
        "value": interval::phi_inv(d).to_string(),
    })
}

pub fn interval(cmd: IntervalCmd) -> CmdResult {
    let IntervalCmd::Demo {
        base,
        x,
        y,
        op,
        op_file,
    } = cmd;
    let op_q = match op {
        OpChoice::Sum => FiniteQuasigroup::cyclic_sum(base)?,
        OpChoice::Translation => build_translation_quasigroup(base)?,
        OpChoice::Idempotent => build_idempotent_quasigroup(base)?,
        OpChoice::File => {
            let path = op_file.ok_or("--op file requires --op-file")?;
            FiniteQuasigroup::new(read_square(&path)?)
        }
    };
    let (xr, yr) = (parse_rational(&x)?, parse_rational(&y)?);
    let (xd, yd) = (interval::phi(&xr, base)?, interval::phi(&yr, base)?);
    let mut r = Report::new(
        "interval demo",
        json!({ "base": base, "x": xr.to_string(), "y": yr.to_string(), "op": op_q.square().rows() }),
    );
    r.check("phi_inv(phi(x)) = x", interval::phi_inv(&xd) == xr);
    r.check("phi_inv(phi(y)) = y", interval::phi_inv(&yd) == yr);
    for (name, v, d) in [("x", &xr, &xd), ("y", &yr, &yd)] {
        let image = interval::phi(&interval::times_base_mod_one(v, base), base)?;
        r.check(
            format!("phi(M{name} mod 1) = shift(phi({name}))"),
            image == interval::t_map(d),
        );
    }
    let product = interval::bullet(&xd, &yd, &op_q);
    let shifted = interval::bullet(&interval::t_map(&xd), &interval::t_map(&yd), &op_q);
    let mut outputs = json!({ "x": digit_json(&xd), "y": digit_json(&yd) });
    match (&product, &shifted) {
        (Ok(p), Ok(s)) => {
            r.check("T(x • y) = T(x) • T(y)", interval::t_map(p) == *s);
            outputs["defined"] = json!(true);
            outputs["product"] = digit_json(p);
            outputs["T(x•y)"] = digit_json(&interval::t_map(p));
            outputs["T(x)•T(y)"] = digit_json(s);
        }
        (Err(Error::ProductInNullSet { digits }), Err(Error::ProductInNullSet { .. })) => {
            r.check("x • y and T(x) • T(y) are both undefined", true);
            outputs["defined"] = json!(false);
            outputs["product"] = Value::Null;
            outputs["undefined_digits"] = json!(digits);
        }
        (Err(e), _) | (_, Err(e)) => match e {
            Error::ProductInNullSet { .. } => {
                r.check("x • y and T(x) • T(y) are defined together", false);
                outputs["defined"] = json!(product.is_ok());
            }
            other => return Err(other.clone().into()),
        },
    }
    r.outputs = outputs;
    Ok(r)
}
