use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use guesslab::constructions::{clique_solution, k22_solution, kkk_solution};
use guesslab::guessing::{
    guessing_number, h_loops, is_routing_solvable, is_solvable, strict_guessing_number,
};
use guesslab::io::{emit, function_to_json, linear_to_json, parse_document, sniff};
use guesslab::linear::{linear_guessing, linear_reduce, prove_not_linearly_solvable};
use guesslab::{
    named, CodingFunction, CompatMode, Digraph, Document, Family, Format, GuessingReport, Limits,
    LinearMode, LinearVerdict,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "guesslab",
    version,
    about = "Guessing numbers, reductions and network-coding solvability"
)]
struct Cli {
    /// Emit machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a graph or coding function by an acyclic vertex set.
    Reduce {
        file: PathBuf,
        /// Comma-separated vertices; empty for the identity reduction.
        #[arg(long, value_parser = vertex_list)]
        vertices: VertexList,
    },
    /// List the fixed points of a coding function.
    Fix { file: PathBuf },
    /// Guessing number g(G,q), or h(G,q) with --strict.
    Guess {
        file: PathBuf,
        #[arg(short)]
        q: u32,
        #[arg(long)]
        strict: bool,
    },
    /// Strict guessing number of the graph with a loop on every vertex.
    Hloops {
        file: PathBuf,
        #[arg(short)]
        q: u32,
    },
    /// Linear guessing number g_L(G,q), or h_L(G,q) with --strict.
    Linear {
        file: PathBuf,
        #[arg(short)]
        q: u32,
        #[arg(long)]
        strict: bool,
    },
    /// Solvability of a graph or unicast instance.
    Solvable {
        file: PathBuf,
        #[arg(short)]
        q: Option<u32>,
        /// Test c(G) = k(G) instead.
        #[arg(long, conflicts_with = "prove_nonlinear")]
        routing: bool,
        /// Try to prove that no linear solution exists over any Z_q.
        #[arg(long)]
        prove_nonlinear: bool,
    },
    /// Weak or strong compatibility of an acyclic set.
    Compat {
        file: PathBuf,
        #[arg(long, value_parser = vertex_list)]
        set: VertexList,
        #[arg(long, value_enum, default_value_t = Mode::Strong)]
        mode: Mode,
    },
    /// Build a named graph or linear solution.
    ///
    /// Graph families: clique N, empty N, transitive N, instar N, outstar N,
    /// star N, cycle N, dicycle N, kab A B, grotzsch, clebsch,
    /// boolean-example, two-pairs, sls-example, gk K, gk-min K.
    /// Linear solutions: clique-solution N Q, kkk K, k22 Q.
    Construct {
        family: String,
        params: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert a unicast instance to its guessing digraph.
    Convert { file: PathBuf },
}

#[derive(Clone)]
struct VertexList(Vec<usize>);

fn vertex_list(s: &str) -> Result<VertexList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("invalid vertex {t:?}")))
        .collect::<Result<_, _>>()
        .map(VertexList)
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Weak,
    Strong,
}

/// Successful runs either confirm (exit 0) or report a negative verdict (exit 1).
enum Verdict {
    Positive,
    Negative,
}

struct Input {
    document: Document,
    format: Format,
}

fn read_input(path: &PathBuf) -> anyhow::Result<Input> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    let parsed = parse_document(&text)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Input {
        document: parsed.value,
        format: sniff(&text),
    })
}

fn read_graph(path: &PathBuf) -> anyhow::Result<Digraph> {
    match read_input(path)?.document {
        Document::Graph(g) => Ok(g),
        Document::Instance(inst) => Ok(inst.to_guessing_digraph()?),
        _ => bail!("expected a graph or unicast instance"),
    }
}

fn value_string(report: &GuessingReport) -> String {
    format_log(report.max_fixed, report.q)
}

fn format_log(count: u64, q: u32) -> String {
    let v = (count as f64).ln() / f64::from(q).ln();
    if (v - v.round()).abs() < 1e-12 {
        format!("{}", v.round())
    } else {
        format!("{v:.6}")
    }
}

fn state_string(x: &[u32]) -> String {
    let sep = if x.iter().all(|&d| d < 10) { "" } else { " " };
    x.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<Verdict> {
    let limits = Limits::from_env()?;
    let json = cli.json;
    match cli.command {
        Command::Reduce {
            file,
            vertices: VertexList(vertices),
        } => {
            let input = read_input(&file)?;
            match input.document {
                Document::Graph(g) => {
                    let r = g.reduce_set(&vertices)?;
                    if json {
                        writeln!(out, "{}", json!({ "graph": r.graph, "map": r.map }))?;
                    } else {
                        write!(out, "{}", emit(&r.graph, input.format))?;
                    }
                }
                Document::Function(f) => {
                    let (h, map) = f.reduce_set_mapped(&vertices)?;
                    if json {
                        writeln!(out, "{}", json!({ "function": h, "map": map }))?;
                    } else {
                        write!(out, "{}", function_to_json(&h))?;
                    }
                }
                Document::Linear(f) => {
                    write!(out, "{}", linear_to_json(&linear_reduce(&f, &vertices)?))?
                }
                Document::Instance(_) => bail!("reduce expects a graph or coding function"),
            }
        }
        Command::Fix { file } => {
            let f: CodingFunction = match read_input(&file)?.document {
                Document::Function(f) => f,
                Document::Linear(l) => l.to_coding_function()?,
                _ => bail!("fix expects a coding function"),
            };
            let fix = f.fixed_points(&limits)?;
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({ "count": fix.len(), "fixed_points": fix.states })
                )?;
            } else {
                writeln!(out, "|Fix| = {}", fix.len())?;
                for x in &fix.states {
                    writeln!(out, "{}", state_string(x))?;
                }
            }
        }
        Command::Guess { file, q, strict } => {
            let g = read_graph(&file)?;
            let report = if strict {
                strict_guessing_number(&g, q, &limits)?
            } else {
                guessing_number(&g, q, &limits)?
            };
            print_guess(out, &report, json)?;
        }
        Command::Hloops { file, q } => {
            let g = read_graph(&file)?;
            print_guess(out, &h_loops(&g, q, &limits)?, json)?;
        }
        Command::Linear { file, q, strict } => {
            let g = read_graph(&file)?;
            let mode = if strict {
                LinearMode::HL
            } else {
                LinearMode::GL
            };
            let r = linear_guessing(&g, q, mode, false, &limits)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&r)?)?;
            } else {
                writeln!(out, "{mode}: max|Fix| = {}", r.max_fixed)?;
                writeln!(out, "value = {}", format_log(r.max_fixed, q))?;
                if let Some(d) = r.dimension {
                    writeln!(out, "dimension = {d}")?;
                }
                write!(out, "witness = {}", linear_to_json(&r.witness))?;
            }
        }
        Command::Solvable {
            file,
            q,
            routing,
            prove_nonlinear,
        } => return solvable(out, &file, q, routing, prove_nonlinear, json, &limits),
        Command::Compat {
            file,
            set: VertexList(set),
            mode,
        } => {
            let g = read_graph(&file)?;
            let mode = match mode {
                Mode::Weak => CompatMode::Weak,
                Mode::Strong => CompatMode::Strong,
            };
            let ok = g.compatibility(&set, mode)?;
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({ "set": set, "mode": format!("{mode:?}").to_lowercase(), "compatible": ok })
                )?;
            } else {
                writeln!(out, "compatible: {ok}")?;
            }
            return Ok(if ok {
                Verdict::Positive
            } else {
                Verdict::Negative
            });
        }
        Command::Construct {
            family,
            params,
            output,
        } => {
            let text = construct(&family, &params, json)?;
            match output {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => write!(out, "{text}")?,
            }
        }
        Command::Convert { file } => {
            let Document::Instance(inst) = read_input(&file)?.document else {
                bail!("convert expects a unicast instance");
            };
            let g = inst.to_guessing_digraph()?;
            write!(
                out,
                "{}",
                emit(&g, if json { Format::Json } else { Format::Dot })
            )?;
        }
    }
    Ok(Verdict::Positive)
}

fn print_guess(out: &mut impl Write, report: &GuessingReport, json: bool) -> anyhow::Result<()> {
    if json {
        let mut v = serde_json::to_value(report)?;
        v["value"] = json!(report.value());
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "max|Fix| = {}", report.max_fixed)?;
        writeln!(out, "value = {}", value_string(report))?;
        writeln!(
            out,
            "method = {}",
            serde_json::to_value(report.method)?.as_str().unwrap_or("?")
        )?;
    }
    Ok(())
}

fn solvable(
    out: &mut impl Write,
    file: &PathBuf,
    q: Option<u32>,
    routing: bool,
    prove_nonlinear: bool,
    json: bool,
    limits: &Limits,
) -> anyhow::Result<Verdict> {
    let (g, instance_q) = match read_input(file)?.document {
        Document::Graph(g) => (g, None),
        Document::Instance(inst) => (inst.to_guessing_digraph()?, Some(inst.q())),
        _ => bail!("solvable expects a graph or unicast instance"),
    };
    if prove_nonlinear {
        let verdict = prove_not_linearly_solvable(&g, limits)?;
        if json {
            writeln!(out, "{}", serde_json::to_string(&verdict)?)?;
        }
        return Ok(match verdict {
            LinearVerdict::NotLinearlySolvable { subgraphs_checked } => {
                if !json {
                    writeln!(out, "verdict: not-linearly-solvable")?;
                    writeln!(out, "subgraphs checked = {subgraphs_checked}")?;
                }
                Verdict::Negative
            }
            LinearVerdict::Inconclusive { subgraph } => {
                if !json {
                    writeln!(out, "verdict: inconclusive")?;
                    write!(out, "{}", emit(&subgraph, Format::Dot))?;
                }
                Verdict::Positive
            }
        });
    }
    let (ok, report) = if routing {
        (is_routing_solvable(&g, limits)?, json!({ "routing": true }))
    } else {
        let q = q
            .or(instance_q)
            .ok_or_else(|| anyhow!("solvable needs -q for a graph"))?;
        (is_solvable(&g, q, limits)?, json!({ "q": q }))
    };
    if json {
        let mut v: Value = report;
        v["solvable"] = json!(ok);
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "solvable: {ok}")?;
    }
    Ok(if ok {
        Verdict::Positive
    } else {
        Verdict::Negative
    })
}

fn construct(family: &str, params: &[usize], json: bool) -> anyhow::Result<String> {
    let arity = |want: usize| -> anyhow::Result<()> {
        if params.len() != want {
            bail!("{family} takes {want} parameter(s), got {}", params.len());
        }
        Ok(())
    };
    let modulus = |p: usize| u32::try_from(p).map_err(|_| anyhow!("modulus {p} too large"));
    match family.to_ascii_lowercase().as_str() {
        "clique-solution" => {
            arity(2)?;
            Ok(linear_to_json(&clique_solution(
                params[0],
                modulus(params[1])?,
            )?))
        }
        "kkk" => {
            arity(1)?;
            let s = kkk_solution(params[0])?;
            Ok(format!("{}\n", serde_json::to_string(&s)?))
        }
        "k22" => {
            arity(1)?;
            Ok(linear_to_json(&k22_solution(modulus(params[0])?)?))
        }
        _ => {
            let g = named(Family::parse(family, params)?)?.graph;
            Ok(emit(&g, if json { Format::Json } else { Format::Dot }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let bound = err
                .downcast_ref::<guesslab::Error>()
                .is_some_and(guesslab::Error::is_resource_bound);
            ExitCode::from(if bound { 3 } else { 2 })
        }
    }
}
