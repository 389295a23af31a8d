use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde_json::{json, Value as Json};
use tol::frontend::json::program_json;
use tol::frontend::{format_program, parse, resolve};
use tol::ops::lower::{eval_atomic, lower_program_with, InputShapes};
use tol::stdlib::goldens::{self, golden_table, GoldenTable};
use tol::stdlib::{case_study, registry_list, run_stdlib};
use tol::tensor_file::{self, TensorFile};
use tol::{EopsReport, Error, Numeric, Result, RunOptions, SpaceId, TypeList, Value};

use crate::args::{Bindings, Cli, Command, Format, OnnxCommand};
use crate::Failure;

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

pub fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { program, bindings, eops, no_memo, out, format } => {
            let (outputs, result, report) = execute(&program, &bindings, !no_memo)?;
            let text = match format {
                Format::Json => {
                    let mut doc = json!({
                        "version": OUTPUT_SCHEMA_VERSION,
                        "result": result,
                        "outputs": outputs.iter().map(|(n, v)| json!({"name": n, "value": tensor_json(v)})).collect::<Vec<_>>(),
                    });
                    if eops {
                        doc["eops"] = report.to_json();
                    }
                    serde_json::to_string_pretty(&doc).expect("json") + "\n"
                }
                Format::Pretty => {
                    let mut s: String = outputs.iter().map(|(n, v)| format!("{n} = {v}\n")).collect();
                    if eops {
                        s += &pretty_report(&report);
                    }
                    s
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Cost { program, bindings, no_memo, format } => {
            let (_, _, report) = execute(&program, &bindings, !no_memo)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("json")),
                Format::Pretty => print!("{}", pretty_report(&report)),
            }
        }
        Command::Parse { program, ast } => {
            let p = parse(&source(&program)?)?;
            if ast {
                println!("{}", serde_json::to_string_pretty(&program_json(&p)).expect("json"));
            } else {
                print!("{}", format_program(&p));
            }
        }
        Command::Fmt { program, write } => {
            let text = format_program(&parse(&source(&program)?)?);
            if write {
                std::fs::write(&program, text).map_err(|e| Error::Io(format!("{program}: {e}")))?;
            } else {
                print!("{text}");
            }
        }
        Command::Lower { program, shapes, sets, check, trials, seed } => lower(&program, &shapes, &sets, check, trials, seed)?,
        Command::Onnx { command } => onnx(command)?,
    }
    Ok(())
}

/// Reads a program file, falling back to the bundled case study of that name.
fn source(program: &str) -> Result<String> {
    let path = Path::new(program);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{program}: {e}")));
    }
    case_study(program)
        .map(|c| c.source.to_string())
        .ok_or_else(|| Error::Io(format!("{program}: no such file or bundled case study")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tensor_json(v: &Value) -> Json {
    serde_json::to_value(TensorFile::from_value(v)).expect("json")
}

fn pretty_report(r: &EopsReport) -> String {
    let mut s = format!("eops total: {}\n", r.total);
    for (k, v) in &r.per_binding {
        s += &format!("  {k}: {v}\n");
    }
    for n in &r.notes {
        s += &format!("  note: {n}\n");
    }
    s
}

fn split_binding(b: &str) -> Result<(&str, &str)> {
    b.split_once('=')
        .filter(|(n, _)| !n.is_empty())
        .ok_or_else(|| Error::Conversion(format!("binding `{b}` is not of the form name=value")))
}

pub fn parse_scalar(text: &str) -> Result<Value> {
    let t = text.trim();
    let n = match t {
        "true" => Numeric::Bool(true),
        "false" => Numeric::Bool(false),
        "+Inf" | "Inf" => Numeric::Float(f64::INFINITY),
        "-Inf" => Numeric::Float(f64::NEG_INFINITY),
        _ => match t.parse::<i64>() {
            Ok(i) => Numeric::Int(i),
            Err(_) => Numeric::Float(t.parse::<f64>().map_err(|_| Error::Conversion(format!("`{t}` is not a number")))?),
        },
    };
    Ok(Value::scalar(n))
}

fn load_bindings(b: &Bindings) -> Result<BTreeMap<String, Value>> {
    let mut env = BTreeMap::new();
    for s in &b.inputs {
        let (name, path) = split_binding(s)?;
        env.insert(name.to_string(), tensor_file::load(Path::new(path))?);
    }
    for s in &b.sets {
        let (name, v) = split_binding(s)?;
        env.insert(name.to_string(), parse_scalar(v)?);
    }
    Ok(env)
}

type Executed = (Vec<(String, Value)>, Option<String>, EopsReport);

fn execute(program: &str, b: &Bindings, memo: bool) -> Result<Executed> {
    let src = source(program)?;
    let p = parse(&src)?;
    let r = resolve(&p)?;
    let env: HashMap<String, Value> = load_bindings(b)?.into_iter().collect();
    if let Some(n) = r.free_inputs.iter().find(|n| !env.contains_key(*n)) {
        return Err(Error::MissingInput(n.clone()));
    }
    let out = tol::run(&p, &env, &RunOptions { seed: b.seed, memo })?;
    Ok((out.outputs, out.result, out.report))
}

/// Splits `a=[2,2],b=[3]:Z` at the commas outside brackets.
pub fn parse_shapes(text: &str) -> Result<InputShapes> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    let mut shapes = InputShapes::new();
    for part in parts.into_iter().map(str::trim).filter(|p| !p.is_empty()) {
        let (name, rest) = split_binding(part)?;
        let (dims, space) = match rest.rsplit_once(':') {
            Some((d, s)) => (d, s.trim().parse::<SpaceId>()?),
            None => (rest, SpaceId::R),
        };
        let inner = dims
            .trim()
            .strip_prefix('[')
            .and_then(|d| d.strip_suffix(']'))
            .ok_or_else(|| Error::ShapeMismatch(format!("shape `{dims}` of `{name}` is not bracketed")))?;
        let shape = inner
            .split(',')
            .map(str::trim)
            .filter(|d| !d.is_empty())
            .map(|d| {
                d.parse::<usize>()
                    .map_err(|_| Error::ShapeMismatch(format!("extent `{d}` of `{name}` is not a concrete size")))
            })
            .collect::<Result<Vec<_>>>()?;
        shapes.insert(name.trim().to_string(), (shape, TypeList::single(space)));
    }
    Ok(shapes)
}

/// Integers in `[-4, 4]` drawn by position, stored in the declared space.
fn random_input(shape: &[usize], tl: &TypeList, seed: u64, trial: u64, slot: usize) -> Result<Value> {
    let n: usize = shape.iter().product::<usize>() * tl.capacity();
    let space = tl.spaces()[0];
    let cells = (0..n)
        .map(|i| {
            let x = (tol::eval::rng::unit(seed, trial, &[slot, i], 0) * 9.0).floor() as i64 - 4;
            let raw = if space.id.is_integral() { Numeric::Int(x.abs()) } else { Numeric::Float(x as f64) };
            space.convert(&raw)
        })
        .collect::<Result<Vec<_>>>()?;
    Value::new(tl.clone(), shape.to_vec(), cells)
}

fn lower(program: &str, shapes: &str, sets: &[String], check: bool, trials: u64, seed: u64) -> Result<(), Failure> {
    let p = parse(&source(program)?)?;
    let r = resolve(&p)?;
    let shapes = parse_shapes(shapes)?;
    let mut constants = HashMap::new();
    for s in sets {
        let (name, v) = split_binding(s)?;
        constants.insert(name.to_string(), parse_scalar(v)?);
    }
    if let Some(n) = r.free_inputs.iter().find(|n| !shapes.contains_key(*n) && !constants.contains_key(*n)) {
        return Err(Error::MissingInput(format!("{n} (no shape given)")).into());
    }
    let (name, tree) = lower_program_with(&p, &shapes, &constants)?;
    println!("{name}={tree}");
    if !check {
        return Ok(());
    }
    for trial in 0..trials {
        let mut env = constants.clone();
        for (slot, (n, (shape, tl))) in shapes.iter().enumerate() {
            env.insert(n.clone(), random_input(shape, tl, seed, trial, slot)?);
        }
        let direct = tol::run(&p, &env, &RunOptions { seed, memo: true })?;
        let want = direct.get(&name).expect("result is bound");
        let got = eval_atomic(&tree, &env)?;
        if !got.approx_eq(want, 1e-9) {
            println!("NOT EQUIVALENT");
            return Err(Failure::NotEquivalent(format!("trial {trial}: atomic {got} vs direct {want}")));
        }
    }
    println!("EQUIVALENT ({trials} trials)");
    Ok(())
}

fn onnx(cmd: OnnxCommand) -> Result<(), Failure> {
    match cmd {
        OnnxCommand::List { format } => {
            let ops = registry_list();
            match format {
                Format::Json => {
                    let rows: Vec<Json> = ops
                        .iter()
                        .map(|o| {
                            json!({"name": o.name, "status": o.status.to_string(), "eops": o.eops_formula, "flops": o.flops_formula})
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows).expect("json"));
                }
                Format::Pretty => {
                    let w = ops.iter().map(|o| o.name.len()).max().unwrap_or(0);
                    for o in ops {
                        println!("{:<w$}  {:<11}  eops {}  flops {}", o.name, o.status.to_string(), o.eops_formula, o.flops_text());
                    }
                }
            }
        }
        OnnxCommand::Run { name, bindings, eops, out, format } => {
            let inputs = load_bindings(&bindings)?;
            let (v, report) = run_stdlib(&name, &inputs, bindings.seed)?;
            let text = match format {
                Format::Json => {
                    let mut doc = json!({
                        "version": OUTPUT_SCHEMA_VERSION,
                        "result": "result",
                        "outputs": [{"name": "result", "value": tensor_json(&v)}],
                    });
                    if eops {
                        doc["eops"] = report.to_json();
                    }
                    serde_json::to_string_pretty(&doc).expect("json") + "\n"
                }
                Format::Pretty => {
                    let mut s = format!("result = {v}\n");
                    if eops {
                        s += &pretty_report(&report);
                    }
                    s
                }
            };
            emit(out.as_deref(), &text)?;
        }
        OnnxCommand::Goldens { dir, update } => goldens_cmd(&dir, update)?,
    }
    Ok(())
}

fn goldens_cmd(dir: &Path, update: bool) -> Result<(), Failure> {
    let table: GoldenTable = golden_table(None)?;
    let files = [(goldens::CSV_FILE, table.to_csv()), (goldens::JSON_FILE, table.to_json())];
    if update {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for (f, text) in &files {
            std::fs::write(dir.join(f), text).map_err(|e| Error::Io(format!("{f}: {e}")))?;
        }
        println!("wrote {} records to {}", table.records.len(), dir.display());
        return Ok(());
    }
    let mut drift = false;
    for (f, text) in &files {
        let path = dir.join(f);
        let old = std::fs::read_to_string(&path).unwrap_or_default();
        let diff = goldens::diff_lines(&old, text);
        if !diff.is_empty() {
            drift = true;
            println!("--- {}", path.display());
            for line in diff {
                println!("{line}");
            }
        }
    }
    if drift {
        return Err(Failure::Drift);
    }
    println!("goldens unchanged ({} records)", table.records.len());
    Ok(())
}
