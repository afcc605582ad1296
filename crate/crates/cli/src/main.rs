use std::fs;
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hormonica::audio::{compile_melody, render_wav, universal_arpeggio};
use hormonica::chord::{markoff_tree, realize_chord, sweep, ChordTriple};
use hormonica::farey::ExtendedRational;
use hormonica::session::{parse_request, serve, Request, Session, SessionConfig};
use hormonica::surface::{builtin_group, QuotientTriangulation};
use hormonica::tessellation::{parse_tuning, TessellationPatch};

const CONFIG_VAR: &str = "HOROMONICA_CONFIG";

#[derive(Parser)]
#[command(name = "hormonica", version, about = "Play and explore the Farey-tessellation instrument")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// TOML session config; overrides $HOROMONICA_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangular chords: check, realize or list.
    Chord {
        #[command(subcommand)]
        action: ChordCommand,
    },
    /// Markoff triples reachable in at most `depth` flips.
    Markoff {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Punctured surfaces of the built-in subgroups.
    Surface {
        #[command(subcommand)]
        action: SurfaceCommand,
    },
    /// Protocol scripts.
    Script {
        #[command(subcommand)]
        action: ScriptCommand,
    },
    /// Play the edges crossed by a horocycle, in order.
    Arpeggio {
        #[arg(long, default_value = "1/0")]
        center: ExtendedRational,
        /// Horocyclic length walked on each side of the origin.
        #[arg(long, default_value_t = 4.0)]
        window: f64,
        /// Seconds per unit of horocyclic length.
        #[arg(long, default_value_t = 0.5)]
        tempo: f64,
        /// JSON tuning script applied to the Farey tessellation first.
        #[arg(long, value_name = "FILE")]
        tuning: Option<PathBuf>,
        #[arg(long, value_name = "OUT")]
        wav: Option<PathBuf>,
    },
    /// Hemitone melodies.
    Melody {
        #[command(subcommand)]
        action: MelodyCommand,
    },
    /// Edges and triangles up to a generation.
    Viewport {
        #[arg(long, default_value_t = 3)]
        gen: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        tuning: Option<PathBuf>,
        /// Width and height of the SVG drawing.
        #[arg(long, default_value_t = 800)]
        size: u32,
    },
    /// Serve the NDJSON protocol on localhost, one session per connection.
    Serve {
        #[arg(long, default_value_t = 7272)]
        port: u16,
    },
}

#[derive(Subcommand)]
enum ChordCommand {
    Check { a: String, b: String, c: String },
    Realize { a: String, b: String, c: String },
    Sweep {
        #[arg(long)]
        max: u64,
    },
}

#[derive(Subcommand)]
enum SurfaceCommand {
    /// Genus, punctures and initial triangulation of gamma2, commutator or gamma3.
    Info { group: String },
}

#[derive(Subcommand)]
enum ScriptCommand {
    /// Feed requests (a JSON array or one per line) to a fresh session.
    Run {
        file: PathBuf,
        #[arg(long, value_name = "OUT")]
        wav: Option<PathBuf>,
        /// Save the resulting session.
        #[arg(long, value_name = "OUT")]
        save: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MelodyCommand {
    /// Turn hemitone numbers (JSON array or whitespace separated) into a
    /// tuning script and taps.
    Compile {
        file: PathBuf,
        /// Seconds between notes.
        #[arg(long, default_value_t = 0.4)]
        spacing: f64,
        #[arg(long, value_name = "OUT")]
        wav: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Svg,
}

/// Failure of a command that was well formed.
struct Domain(String);

impl<E: std::fmt::Display> From<E> for Domain {
    fn from(e: E) -> Self {
        Domain(e.to_string())
    }
}

type Outcome = Result<bool, Domain>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_config(flag: Option<&Path>) -> Result<SessionConfig, Domain> {
    let path = match flag {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(CONFIG_VAR) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => return Ok(SessionConfig::default()),
        },
    };
    let text = fs::read_to_string(&path).map_err(|e| Domain(format!("{}: {e}", path.display())))?;
    let config: SessionConfig = toml::from_str(&text).map_err(|e| Domain(format!("{}: {e}", path.display())))?;
    config.validate().map_err(|e| Domain(format!("{}: {e}", path.display())))?;
    Ok(config)
}

fn read(path: &Path) -> Result<String, Domain> {
    fs::read_to_string(path).map_err(|e| Domain(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Domain> {
    fs::write(path, bytes).map_err(|e| Domain(format!("{}: {e}", path.display())))
}

fn triple(a: &str, b: &str, c: &str) -> Result<ChordTriple, Domain> {
    let n = |s: &str| s.parse::<num_bigint::BigInt>().map_err(|_| Domain(format!("{s:?} is not an integer")));
    Ok(ChordTriple::new(n(a)?, n(b)?, n(c)?)?)
}

fn tuned(tuning: Option<&Path>) -> Result<TessellationPatch, Domain> {
    let mut t = TessellationPatch::new();
    if let Some(path) = tuning {
        let script = parse_tuning(&read(path)?).map_err(|e| Domain(format!("{}: {e}", path.display())))?;
        t.apply_script(&script).map_err(|(k, e)| Domain(format!("tuning step {k}: {e}")))?;
    }
    Ok(t)
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<(), Domain> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::Chord { action } => chord(action, cli.json, out),
        Command::Markoff { depth } => {
            let tree = markoff_tree(*depth);
            if cli.json {
                emit(out, &json!(tree))?;
            } else {
                let line: Vec<String> = tree.iter().map(|m| m.to_string().replace(' ', "")).collect();
                writeln!(out, "{}", line.join(","))?;
            }
            Ok(true)
        }
        Command::Surface { action: SurfaceCommand::Info { group } } => {
            let table = builtin_group(group)?;
            let kind = table.classify()?;
            let q = QuotientTriangulation::new(&table);
            let cusps = q.cusps();
            if cli.json {
                emit(
                    out,
                    &json!({
                        "group": group,
                        "index": table.index(),
                        "genus": kind.genus,
                        "punctures": kind.punctures,
                        "edges": q.edge_count(),
                        "triangles": q.triangle_count(),
                        "cusp_valences": cusps.iter().map(Vec::len).collect::<Vec<_>>(),
                        "lambdas": q.lambdas().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "{group}: index {}, g={}, s={}, edges={}, triangles={}",
                    table.index(),
                    kind.genus,
                    kind.punctures,
                    q.edge_count(),
                    q.triangle_count()
                )?;
                for (k, c) in cusps.iter().enumerate() {
                    writeln!(out, "  cusp {k}: {} dart(s)", c.len())?;
                }
            }
            Ok(true)
        }
        Command::Script { action: ScriptCommand::Run { file, wav, save } } => {
            let config = load_config(cli.config.as_deref())?;
            script(&read(file)?, config, wav.as_deref(), save.as_deref(), out)
        }
        Command::Arpeggio { center, window, tempo, tuning, wav } => {
            let config = load_config(cli.config.as_deref())?;
            let t = tuned(tuning.as_deref())?;
            let crossings = t.horocycle_crossings(center, *window)?;
            let score = universal_arpeggio(&t, center, *window, *tempo, &config.play)?;
            if let Some(path) = wav {
                write_file(path, &render_wav(&score, &config.synth)?)?;
            }
            if cli.json {
                emit(out, &json!({ "crossings": crossings, "score": score }))?;
            } else {
                for (c, e) in crossings.iter().zip(score.events()) {
                    writeln!(out, "{:>8.3}s  {:<12} lambda {:<6} {:.3} Hz", e.t, c.edge.to_string(), c.lambda, e.freq)?;
                }
            }
            Ok(true)
        }
        Command::Melody { action: MelodyCommand::Compile { file, spacing, wav } } => {
            let config = load_config(cli.config.as_deref())?;
            let notes = parse_notes(&read(file)?)?;
            let melody = compile_melody(&notes)?;
            let (_, score) = melody.perform(*spacing, &config.play)?;
            if let Some(path) = wav {
                write_file(path, &render_wav(&score, &config.synth)?)?;
            }
            if cli.json {
                emit(out, &json!({ "melody": melody, "score": score }))?;
            } else {
                writeln!(out, "tuning: {} flips", melody.tuning.len())?;
                for f in &melody.tuning {
                    writeln!(out, "  flip {}", f.edge)?;
                }
                let taps: Vec<String> = melody.taps.iter().map(ToString::to_string).collect();
                writeln!(out, "taps: {}", taps.join(" "))?;
            }
            Ok(true)
        }
        Command::Viewport { gen, format, tuning, size } => {
            let config = load_config(cli.config.as_deref())?;
            let t = tuned(tuning.as_deref())?;
            match format {
                Format::Svg => write!(out, "{}", t.viewport_svg(*gen, *size))?,
                Format::Json => {
                    let mut session = Session::new("viewport", config);
                    for f in t.to_script() {
                        if let Some(e) = session.handle(Request::pedal(f.edge)).iter().find(|r| r.is_error()) {
                            return Err(Domain(e.to_json()));
                        }
                    }
                    let view = session.tessellation(*gen).map_err(Domain)?;
                    emit(out, &serde_json::to_value(view)?)?;
                }
            }
            Ok(true)
        }
        Command::Serve { port } => {
            let config = load_config(cli.config.as_deref())?;
            let listener = TcpListener::bind(("127.0.0.1", *port))?;
            eprintln!("listening on {}", listener.local_addr()?);
            serve(listener, config, None)?;
            Ok(true)
        }
    }
}

fn chord(action: &ChordCommand, as_json: bool, out: &mut dyn Write) -> Outcome {
    match action {
        ChordCommand::Check { a, b, c } => {
            let t = triple(a, b, c)?;
            let verdict = t.check();
            if as_json {
                let mut v = json!({ "triple": t, "chord": verdict.is_ok() });
                if let Err(why) = &verdict {
                    v["reason"] = json!(why.to_string());
                }
                emit(out, &v)?;
            } else {
                match &verdict {
                    Ok(()) => writeln!(out, "chord")?,
                    Err(why) => writeln!(out, "not a chord ({why})")?,
                }
            }
            Ok(verdict.is_ok())
        }
        ChordCommand::Realize { a, b, c } => {
            let t = triple(a, b, c)?;
            if let Err(why) = t.check() {
                if as_json {
                    emit(out, &json!({ "triple": t, "chord": false, "reason": why.to_string() }))?;
                } else {
                    writeln!(out, "not a chord ({why})")?;
                }
                return Ok(false);
            }
            let cert = realize_chord(&t)?;
            if as_json {
                emit(out, &json!({ "triple": t, "chord": true, "certificate": cert }))?;
            } else {
                let v = &cert.vertices;
                writeln!(out, "vertices {} {} {}", v[0], v[1], v[2])?;
                let l = &cert.lambdas;
                writeln!(out, "lambdas  {} {} {} (opposite each vertex)", l[0], l[1], l[2])?;
            }
            Ok(true)
        }
        ChordCommand::Sweep { max } => {
            let chords = sweep(*max);
            if as_json {
                emit(out, &json!(chords))?;
            } else {
                for c in &chords {
                    writeln!(out, "{c}")?;
                }
                writeln!(out, "{} chords with entries up to {max}", chords.len())?;
            }
            Ok(true)
        }
    }
}

fn parse_notes(text: &str) -> Result<Vec<u32>, Domain> {
    if text.trim_start().starts_with('[') {
        return Ok(serde_json::from_str(text)?);
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Domain(format!("{s:?} is not a hemitone number"))))
        .collect()
}

/// Requests from a JSON array, or one JSON object per non-blank line.
fn parse_script(text: &str) -> Result<Vec<String>, Domain> {
    if text.trim_start().starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(text)?;
        return Ok(items.iter().map(Value::to_string).collect());
    }
    Ok(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string).collect())
}

fn script(text: &str, config: SessionConfig, wav: Option<&Path>, save: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let mut session = Session::new("script", config);
    let mut clean = true;
    for (k, line) in parse_script(text)?.iter().enumerate() {
        if let Err(e) = parse_request(line) {
            return Err(Domain(format!("request {k}: {e}")));
        }
        for r in session.handle_line(line) {
            clean &= !r.is_error();
            writeln!(out, "{}", r.to_json())?;
        }
    }
    if let Some(path) = wav {
        write_file(path, &session.render_wav()?)?;
    }
    if let Some(path) = save {
        hormonica::session::save_session(&session, path)?;
    }
    Ok(clean)
}
