//! `rd-pivot`: command-line front end.
//!
//! Exit codes: 0 for success or a true verdict, 1 for a false verdict,
//! 2 for usage or input errors.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use rd_pivot::analysis::{self, MobilityVerdict, ModuleReason};
use rd_pivot::gadgets::{self, GadgetKind, GadgetSpec};
use rd_pivot::mesh::{self, MeshFormat};
use rd_pivot::planar;
use rd_pivot::search::{self, Outcome, SearchLimits, SearchOptions};
use rd_pivot::{Catalog, Configuration, CoordSystem, Error, MoveModel, Position, Rules, SymmetryOp};

#[derive(Parser)]
#[command(name = "rd-pivot", version, about = "Pivoting rhombic-dodecahedron modules on the FCC lattice")]
struct Cli {
    /// Move model.
    #[arg(long, global = true, value_enum, default_value_t = Model::Restricted)]
    model: Model,

    /// Move catalog JSON; defaults to the bundled catalog.
    #[arg(long, global = true, env = "RD_PIVOT_CATALOG")]
    catalog: Option<PathBuf>,

    /// Coordinate convention of configuration files read and written.
    #[arg(long, global = true, value_enum, default_value_t = Coords::Xyz)]
    coords: Coords,

    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    /// Search threads (1 = inline, 0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Restricted,
    Monkey,
}

impl From<Model> for MoveModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Restricted => MoveModel::Restricted,
            Model::Monkey => MoveModel::Monkey,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Coords {
    Xyz,
    Hex,
}

impl From<Coords> for CoordSystem {
    fn from(c: Coords) -> Self {
        match c {
            Coords::Xyz => CoordSystem::Xyz,
            Coords::Hex => CoordSystem::Hex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Off,
    Obj,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a configuration; true when it is connected.
    Validate {
        file: PathBuf,
        /// Treat a disconnected configuration as an input error.
        #[arg(long)]
        strict: bool,
    },
    /// List legal moves.
    Moves {
        file: PathBuf,
        /// Only moves of the module at x,y,z.
        #[arg(long, value_parser = parse_position)]
        module: Option<Position>,
    },
    /// Per-module mobility; true when no module can move.
    Rigid { file: PathBuf },
    /// Super-rigidity verdict; negative verdicts carry witnesses.
    SuperRigid {
        file: PathBuf,
        /// Skip witness construction.
        #[arg(long)]
        no_witnesses: bool,
    },
    /// Whether TARGET is reachable from SOURCE up to translation.
    Reach {
        source: PathBuf,
        target: PathBuf,
        /// states:depth:seconds, empty or `-` for unbounded.
        #[arg(long, default_value = "::")]
        limits: SearchLimits,
        /// Deduplicate states up to the 12 point symmetries as well.
        #[arg(long)]
        symmetry: bool,
    },
    /// Enumerate the component of a configuration.
    Explore {
        file: PathBuf,
        #[arg(long, default_value = "::")]
        limits: SearchLimits,
        #[arg(long)]
        symmetry: bool,
    },
    /// Build a gadget configuration.
    Gadget {
        #[arg(value_parser = parse_kind)]
        kind: GadgetKind,
        #[arg(long, default_value_t = 1)]
        radius: i32,
        #[arg(long, default_value_t = 2)]
        path_length: i32,
        /// Roof layer.
        #[arg(long, default_value_t = 0)]
        layer: i32,
        /// Cap direction, an in-layer neighbor offset x,y,z.
        #[arg(long, value_parser = parse_position)]
        direction: Option<Position>,
        /// Translation applied last, x,y,z.
        #[arg(long, value_parser = parse_position)]
        anchor: Option<Position>,
        /// Point symmetry `p0,p1,p2,sign` applied before translation.
        #[arg(long, value_parser = parse_symmetry)]
        orientation: Option<SymmetryOp>,
    },
    /// Write one rhombic dodecahedron per module as OFF or OBJ.
    ExportMesh {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Off)]
        format: Format,
        /// Output file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Integrity checks on the catalog; true when all pass.
    CheckCatalog,
}

fn parse_position(s: &str) -> Result<Position, String> {
    let v: Vec<i32> = s
        .split(',')
        .map(|t| t.trim().parse::<i32>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, z] => Position::new(x, y, z).map_err(|e| e.to_string()),
        _ => Err(format!("expected x,y,z, got {s:?}")),
    }
}

fn parse_symmetry(s: &str) -> Result<SymmetryOp, String> {
    let v: Vec<i32> = s
        .split(',')
        .map(|t| t.trim().parse::<i32>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, sign] if [a, b, c].iter().all(|&i| (0..3).contains(&i)) => {
            SymmetryOp::new([a as usize, b as usize, c as usize], sign).map_err(|e| e.to_string())
        }
        _ => Err(format!("expected p0,p1,p2,sign with p a permutation of 0,1,2, got {s:?}")),
    }
}

fn parse_kind(s: &str) -> Result<GadgetKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Result of a subcommand: output text and verdict.
struct Report {
    text: String,
    verdict: bool,
}

impl Report {
    fn new(text: String, verdict: bool) -> Self {
        Self { text, verdict }
    }
}

struct App {
    model: MoveModel,
    catalog: Catalog,
    coords: CoordSystem,
    pretty: bool,
    threads: usize,
}

impl App {
    fn rules(&self) -> Rules<'_> {
        Rules::new(&self.catalog, self.model)
    }

    fn read(&self, path: &Path, strict: bool) -> anyhow::Result<Configuration> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        } else {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        };
        // The file names its own convention; --coords only fills in a
        // missing field.
        let mut value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("{}: malformed JSON", path.display()))?;
        if let Some(obj) = value.as_object_mut() {
            obj.entry("coords").or_insert_with(|| json!(self.coords));
        }
        Configuration::parse(&value.to_string(), strict).with_context(|| format!("{}", path.display()))
    }

    fn json<T: Serialize>(&self, value: &T) -> String {
        if self.pretty {
            serde_json::to_string_pretty(value)
        } else {
            serde_json::to_string(value)
        }
        .expect("plain data serializes")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let mut text = report.text;
            if !text.is_empty() && !text.ends_with('\n') {
                text.push('\n');
            }
            // A closed pipe downstream is not an error of ours.
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: writing output: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::from(if report.verdict { 0 } else { 1 }),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let catalog = match &cli.catalog {
        Some(path) => Catalog::load(path).with_context(|| format!("catalog {}", path.display()))?,
        None => Catalog::shipped().clone(),
    };
    let ctx = App {
        model: cli.model.into(),
        catalog,
        coords: cli.coords.into(),
        pretty: cli.pretty,
        threads: cli.threads,
    };
    match cli.command {
        Command::Validate { file, strict } => validate(&ctx, &file, strict),
        Command::Moves { file, module } => moves(&ctx, &file, module),
        Command::Rigid { file } => rigid(&ctx, &file),
        Command::SuperRigid { file, no_witnesses } => super_rigid(&ctx, &file, !no_witnesses),
        Command::Reach {
            source,
            target,
            limits,
            symmetry,
        } => reach(&ctx, &source, &target, &limits, symmetry),
        Command::Explore { file, limits, symmetry } => explore(&ctx, &file, &limits, symmetry),
        Command::Gadget {
            kind,
            radius,
            path_length,
            layer,
            direction,
            anchor,
            orientation,
        } => {
            let mut spec = GadgetSpec::new(kind);
            spec.radius = radius;
            spec.path_length = path_length;
            spec.layer = layer;
            if let Some(d) = direction {
                spec.direction = d;
            }
            if let Some(a) = anchor {
                spec.anchor = a;
            }
            if let Some(o) = orientation {
                spec.orientation = o;
            }
            let c = gadgets::build(&spec)?;
            Ok(Report::new(c.serialize_with(ctx.coords, ctx.pretty), true))
        }
        Command::ExportMesh { file, format, output } => {
            let c = ctx.read(&file, false)?;
            let format = match format {
                Format::Off => MeshFormat::Off,
                Format::Obj => MeshFormat::Obj,
            };
            let text = mesh::export_mesh(&c, format);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Report::new(String::new(), true))
                }
                None => Ok(Report::new(text, true)),
            }
        }
        Command::CheckCatalog => check_catalog(&ctx),
    }
}

fn validate(ctx: &App, file: &Path, strict: bool) -> anyhow::Result<Report> {
    let c = ctx.read(file, strict)?;
    let connected = c.is_connected();
    let (lo, hi) = c.layer_range();
    let text = if ctx.pretty {
        format!(
            "{} modules, layers {lo}..={hi}, {}\n",
            c.len(),
            if connected { "connected" } else { "disconnected" }
        )
    } else {
        ctx.json(&json!({"modules": c.len(), "connected": connected, "layers": [lo, hi]}))
    };
    Ok(Report::new(text, connected))
}

fn moves(ctx: &App, file: &Path, module: Option<Position>) -> anyhow::Result<Report> {
    let c = ctx.read(file, true)?;
    let rules = ctx.rules();
    let list = match module {
        Some(p) => rules.moves_of(&c, p)?,
        None => rules.legal_moves(&c)?,
    };
    let text = if ctx.pretty {
        let mut s = format!("{} legal moves\n", list.len());
        for m in &list {
            writeln!(s, "  {} -> {}  {}  template {}", m.source, m.target, m.class, m.template).unwrap();
        }
        s
    } else {
        ctx.json(&list)
    };
    Ok(Report::new(text, true))
}

fn rigid(ctx: &App, file: &Path) -> anyhow::Result<Report> {
    let c = ctx.read(file, true)?;
    let report = analysis::mobility(&c, &ctx.rules())?;
    let rigid = report.mobile == 0;
    let text = if ctx.pretty {
        let mut s = format!(
            "{}: {} mobile, {} disconnecting, {} blocked\n",
            if rigid { "rigid" } else { "not rigid" },
            report.mobile,
            report.disconnecting,
            report.blocked
        );
        for m in report.modules.iter().filter(|m| m.verdict == MobilityVerdict::Mobile) {
            writeln!(s, "  mobile {} ({} moves)", m.position, m.moves.len()).unwrap();
        }
        s
    } else {
        ctx.json(&json!({"rigid": rigid, "model": ctx.model, "report": report}))
    };
    Ok(Report::new(text, rigid))
}

fn super_rigid(ctx: &App, file: &Path, witnesses: bool) -> anyhow::Result<Report> {
    let c = ctx.read(file, true)?;
    let verdict = analysis::super_rigidity(&c, &ctx.rules(), witnesses)?;
    let text = if ctx.pretty {
        let mut s = format!("{}\n", if verdict.super_rigid { "super rigid" } else { "not super rigid" });
        for a in &verdict.modules {
            let why = match &a.reason {
                ModuleReason::Sandwiched { pair } => format!("sandwiched between {} and {}", pair[0], pair[1]),
                ModuleReason::Blocked => "every template needs a cell the configuration occupies".to_string(),
                ModuleReason::Enablable { templates } => format!("can be enabled by {} templates", templates.len()),
            };
            writeln!(s, "  {}: {why}", a.position).unwrap();
        }
        for w in &verdict.witnesses {
            writeln!(
                s,
                "  witness: {} -> {} with {} modules",
                w.legal_move.source,
                w.legal_move.target,
                w.configuration.len()
            )
            .unwrap();
        }
        s
    } else {
        ctx.json(&verdict)
    };
    Ok(Report::new(text, verdict.super_rigid))
}

fn reach(ctx: &App, source: &Path, target: &Path, limits: &SearchLimits, symmetry: bool) -> anyhow::Result<Report> {
    let s = ctx.read(source, true)?;
    let t = ctx.read(target, true)?;
    let options = SearchOptions {
        symmetry,
        threads: ctx.threads,
    };
    let result = match search::reachable(&s, &t, &ctx.rules(), limits, &options) {
        Err(Error::SizeMismatch(a, b)) => {
            let text = if ctx.pretty {
                format!("not reachable: sizes differ ({a} vs {b})\n")
            } else {
                ctx.json(&json!({"outcome": "size_mismatch", "source_modules": a, "target_modules": b}))
            };
            return Ok(Report::new(text, false));
        }
        other => other?,
    };
    let reached = result.outcome == Outcome::Reached;
    let text = if ctx.pretty {
        let mut s = format!("{} after {} states\n", result.outcome, result.states_explored);
        for m in &result.moves {
            writeln!(s, "  {} -> {}  {}", m.source, m.target, m.class).unwrap();
        }
        s
    } else {
        ctx.json(&json!({
            "outcome": result.outcome,
            "states_explored": result.states_explored,
            "trace": search::trace(&result.moves),
        }))
    };
    Ok(Report::new(text, reached))
}

fn explore(ctx: &App, file: &Path, limits: &SearchLimits, symmetry: bool) -> anyhow::Result<Report> {
    let c = ctx.read(file, true)?;
    let options = SearchOptions {
        symmetry,
        threads: ctx.threads,
    };
    let stats = search::explore(&c, &ctx.rules(), limits, &options)?;
    let text = if ctx.pretty {
        format!(
            "{} states ({}), depth profile {:?}\n",
            stats.states,
            if stats.complete { "complete" } else { "incomplete" },
            stats.depth_profile
        )
    } else {
        ctx.json(&stats)
    };
    Ok(Report::new(text, true))
}

fn check_catalog(ctx: &App) -> anyhow::Result<Report> {
    let catalog = &ctx.catalog;
    let sandwich: Vec<_> = MoveModel::ALL
        .iter()
        .map(|&m| (m, analysis::verify_sandwich_lemma(&Rules::new(catalog, m))))
        .collect();
    let symmetry_closed = catalog.is_symmetry_closed();
    let reversal_closed = catalog.is_reversal_closed();
    let planar = planar::check_2d_equivalence(catalog);
    let ok = sandwich.iter().all(|(_, v)| *v) && symmetry_closed && reversal_closed && planar.all_matched;
    let text = if ctx.pretty {
        let mut s = String::new();
        for (m, v) in &sandwich {
            writeln!(s, "opposite-pair blocking ({m}): {}", pass(*v)).unwrap();
        }
        writeln!(s, "closed under symmetries: {}", pass(symmetry_closed)).unwrap();
        writeln!(s, "closed under reversal: {}", pass(reversal_closed)).unwrap();
        for c in &planar.classes {
            writeln!(s, "in-layer slice matches hexagon moves ({}): {}", c.class, pass(c.matched)).unwrap();
        }
        s
    } else {
        let sandwich: serde_json::Map<String, serde_json::Value> =
            sandwich.iter().map(|(m, v)| (m.to_string(), json!(v))).collect();
        ctx.json(&json!({
            "ok": ok,
            "templates": catalog.templates(MoveModel::Monkey).len(),
            "restricted_templates": catalog.templates(MoveModel::Restricted).len(),
            "sandwich_lemma": sandwich,
            "symmetry_closed": symmetry_closed,
            "reversal_closed": reversal_closed,
            "planar": planar,
        }))
    };
    Ok(Report::new(text, ok))
}

fn pass(v: bool) -> &'static str {
    if v {
        "pass"
    } else {
        "FAIL"
    }
}
