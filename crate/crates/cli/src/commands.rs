use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relctl::control::{ControlSolver, Rule};
use relctl::dsl::{self, DslEnv, DslError};
use relctl::election::{
    condorcet_winners, covering, sub_election, uncovered, verify_deletion, DominanceView, Election, ElectionError,
    ParseMode,
};
use relctl::oracle::{oracle_solve, OracleConfig};
use relctl::reduction::{
    audit_margins, build_control_instance, planted_instance, random_instance, reduce_1in3_to_x4c, OneInThreeInstance,
    X4CInstance,
};
use relctl::relalg::{RelAlgebra, Relation};
use serde_json::json;

use crate::Command;

/// An error together with the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

const USAGE: u8 = 1;
const PARSE: u8 = 2;
const TYPE: u8 = 3;

type Outcome = Result<(), Failure>;

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code,
        error: error.into(),
    }
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    fail(USAGE, error)
}

fn election_failure(e: ElectionError) -> Failure {
    match e {
        ElectionError::Parse { .. } => fail(PARSE, e),
        other => usage(other),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(usage)
}

fn load_election(path: &Path, permissive: bool) -> Result<Election, Failure> {
    let mode = if permissive { ParseMode::Permissive } else { ParseMode::Strict };
    Election::parse_with(&read(path)?, mode)
        .map_err(|e| fail(PARSE, anyhow!("{}: {e}", path.display())))
}

fn load_json<T>(path: &Path, parse: impl FnOnce(&str) -> serde_json::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| fail(PARSE, anyhow!("{}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn names(e: &Election, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| e.alternatives()[i].clone()).collect()
}

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Winners { election, json } => {
            let e = load_election(&election.file, election.permissive)?;
            winners(&e, json)
        }
        Command::Control {
            election,
            target,
            rule,
            enumerate,
            oracle,
            json,
        } => {
            let e = load_election(&election.file, election.permissive)?;
            control(&e, &target, rule, enumerate, oracle, json)
        }
        Command::Check {
            election,
            target,
            rule,
            delete,
            json,
        } => {
            let e = load_election(&election.file, election.permissive)?;
            check(&e, &target, rule, &delete, json)
        }
        Command::Eval {
            script,
            election,
            target,
            permissive,
            limit,
            json,
            dot,
        } => {
            let e = election.map(|p| load_election(&p, permissive)).transpose()?;
            eval(&script, e.as_ref(), target.as_deref(), limit, json, dot)
        }
        Command::Reduce {
            instance,
            out,
            layout,
            audit,
        } => reduce(&instance, &out, layout, audit),
        Command::GenX4c { n, seed, random, out } => gen_x4c(n, seed, random, out.as_deref()),
        Command::Reduce1in3 { instance, out } => {
            let inst: OneInThreeInstance = load_json(&instance, |s| serde_json::from_str(s))?;
            let x = reduce_1in3_to_x4c(&inst).map_err(usage)?;
            emit(out.as_deref(), &(pretty(&serde_json::to_value(&x).expect("serializable")) + "\n"))
        }
    }
}

/// Dominance and covering of `e`, rendered for humans or as JSON.
fn report(e: &Election, json: bool) -> Result<(String, serde_json::Value), ElectionError> {
    let mut alg = RelAlgebra::new(e.engine_width());
    e.register_labels(&mut alg);
    let view = DominanceView::compute(&mut alg, e)?;
    let winners = condorcet_winners(&mut alg, &view.c)?;
    let g = covering(&mut alg, &view.c)?;
    let free = uncovered(&mut alg, &g)?;
    let mut text = String::new();
    let mut value = serde_json::Value::Null;
    if json {
        value = view.to_json(&mut alg, e)?;
        value["uncovered"] = json!(names(e, &free));
    } else {
        let w = winners.first().map(|&w| e.alternatives()[w].as_str()).unwrap_or("none");
        let _ = writeln!(text, "winner: {w}");
        let _ = write!(text, "dominance:\n{}", indent(&alg.format_matrix(&view.c)?));
        let _ = write!(text, "covering:\n{}", indent(&alg.format_matrix(&g)?));
        let _ = writeln!(text, "uncovered: {}", names(e, &free).join(" "));
    }
    Ok((text, value))
}

fn winners(e: &Election, json: bool) -> Outcome {
    let (text, value) = report(e, json).map_err(election_failure)?;
    if json {
        println!("{}", pretty(&value));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn control(e: &Election, target: &str, rule: Rule, limit: usize, oracle: bool, json: bool) -> Outcome {
    let result = if oracle {
        oracle_solve(e, target, rule, limit, &OracleConfig::from_env()).map_err(usage)?
    } else {
        ControlSolver::new(e)
            .and_then(|mut s| s.solve(target, rule, limit))
            .map_err(election_failure)?
    };
    if json {
        println!("{}", pretty(&result.to_json()));
    } else {
        print!("{result}");
    }
    Ok(())
}

fn check(e: &Election, target: &str, rule: Rule, delete: &[usize], json: bool) -> Outcome {
    let t = e.alternative_index(target).map_err(usage)?;
    if delete.contains(&0) {
        return Err(usage(anyhow!("voters are numbered from 1")));
    }
    let mut del: Vec<usize> = delete.iter().map(|d| d - 1).collect();
    del.sort_unstable();
    del.dedup();
    let wins = verify_deletion(e, &del, t, rule).map_err(usage)?;
    let keep: Vec<usize> = (0..e.num_voters()).filter(|i| del.binary_search(i).is_err()).collect();
    let rest = sub_election(e, &keep).map_err(usage)?;
    let (text, mut value) = report(&rest, json).map_err(election_failure)?;
    if json {
        let obj = json!({
            "target": target,
            "rule": rule.as_str(),
            "delete": del.iter().map(|d| d + 1).collect::<Vec<_>>(),
            "wins": wins,
        });
        for (k, v) in obj.as_object().expect("object") {
            value[k] = v.clone();
        }
        println!("{}", pretty(&value));
    } else {
        println!("target {target} wins under {rule}: {wins}");
        print!("{text}");
    }
    Ok(())
}

fn dsl_failure(e: DslError) -> Failure {
    match e {
        DslError::Parse(_) => fail(PARSE, e),
        DslError::Type(_) => fail(TYPE, e),
        DslError::Eval(_) => usage(e),
    }
}

const MATRIX_CELLS: usize = 64 * 64;

fn eval(script: &Path, e: Option<&Election>, target: Option<&str>, limit: usize, json: bool, dot: bool) -> Outcome {
    let text = read(script)?;
    let parsed = dsl::parse(&text).map_err(|x| dsl_failure(x.into()))?;
    let target = match (e, target) {
        (Some(e), Some(t)) => Some(e.alternative_index(t).map_err(usage)?),
        _ => None,
    };
    let setup = |width: u32| -> Result<(RelAlgebra, DslEnv), Failure> {
        let mut alg = RelAlgebra::new(width.max(1));
        let env = match e {
            Some(e) => DslEnv::for_election(&mut alg, e, target).map_err(election_failure)?,
            None => DslEnv::default(),
        };
        Ok((alg, env))
    };
    let (mut alg, mut env) = setup(e.map_or(1, Election::engine_width))?;
    let typed = dsl::typecheck(&parsed, &env.type_env()).map_err(|x| dsl_failure(x.into()))?;
    if typed.required_width > alg.width() {
        (alg, env) = setup(typed.required_width)?;
    }
    let r = dsl::eval(&typed, &mut alg, &env).map_err(|x| dsl_failure(x.into()))?;
    if dot {
        print!("{}", alg.manager().to_dot(r.func()).map_err(usage)?);
        return Ok(());
    }
    let out = render_relation(&alg, &r, limit, json).map_err(usage)?;
    print!("{out}");
    Ok(())
}

fn render_relation(alg: &RelAlgebra, r: &Relation, limit: usize, json: bool) -> anyhow::Result<String> {
    let count = alg.entry_count(r)?;
    let cells = r
        .source()
        .small_size()
        .zip(r.target().small_size())
        .and_then(|(a, b)| a.checked_mul(b))
        .filter(|&c| c <= MATRIX_CELLS);
    let pairs = alg.entries(r, limit)?;
    let truncated = count > pairs.len().into();
    let labelled: Vec<(String, String)> = pairs
        .iter()
        .map(|&(i, j)| (alg.element_label(r.source(), i), alg.element_label(r.target(), j)))
        .collect();
    if json {
        let mut v = json!({
            "type": r.type_string(),
            "entries": count.to_string(),
            "pairs": labelled.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "truncated": truncated,
        });
        if cells.is_some() {
            let d = alg.to_dense(r)?;
            let m: Vec<Vec<bool>> = (0..d.rows()).map(|i| (0..d.cols()).map(|j| d.get(i, j)).collect()).collect();
            v["matrix"] = json!(m);
        }
        return Ok(pretty(&v) + "\n");
    }
    let mut out = format!("type: {}\nentries: {count}\n", r.type_string());
    if cells.is_some() {
        out.push_str(&alg.format_matrix(r)?);
    } else {
        for (a, b) in &labelled {
            let _ = writeln!(out, "  {a} {b}");
        }
        if truncated {
            out.push_str("  ...\n");
        }
    }
    Ok(out)
}

fn reduce(instance: &Path, out: &Path, layout: Option<PathBuf>, audit: bool) -> Outcome {
    let inst: X4CInstance = load_json(instance, |s| serde_json::from_str(s))?;
    let (e, lay) = build_control_instance(&inst).map_err(usage)?;
    write(out, &e.to_file_string())?;
    let layout_path = layout.unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".layout.json");
        PathBuf::from(p)
    });
    write(&layout_path, &(pretty(&serde_json::to_value(&lay).expect("serializable")) + "\n"))?;
    println!(
        "wrote {} ({} voters, {} alternatives, target {}, budget {})",
        out.display(),
        e.num_voters(),
        e.num_alternatives(),
        lay.target,
        lay.budget
    );
    println!("wrote {}", layout_path.display());
    if audit {
        let a = audit_margins(&e, &lay);
        println!("{}", pretty(&serde_json::to_value(&a).expect("serializable")));
        if !a.deviations.is_empty() {
            return Err(usage(anyhow!("{} margins differ from their predicted values", a.deviations.len())));
        }
    }
    Ok(())
}

fn gen_x4c(n: usize, seed: u64, random: bool, out: Option<&Path>) -> Outcome {
    if n == 0 || n % 4 != 0 {
        return Err(usage(anyhow!("--n must be a positive multiple of 4")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = if random {
        random_instance(n, &mut rng)
    } else {
        let (inst, cover) = planted_instance(n, &mut rng);
        let sets: Vec<String> = cover.iter().map(|c| (c + 1).to_string()).collect();
        eprintln!("planted exact cover: sets {}", sets.join(","));
        inst
    };
    emit(out, &(pretty(&serde_json::to_value(&inst).expect("serializable")) + "\n"))
}
