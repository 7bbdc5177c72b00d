use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use coxeter::bounds::{bound_set, refine_k_bound, RefineConfig, SearchShape};
use coxeter::classify::{classify, elliptic_type, DiagramClass};
use coxeter::diagram::{parse_cox, CoxDocument};
use coxeter::enumerate::{enumerate_p, EnumConfig, EnumResult, Found};
use coxeter::error::Error;
use coxeter::essential::{double, find_dissections, load_catalog, load_entry, subgroup_filter, volume, FilterVerdict};
use coxeter::numeric::set_zero_tol;
use coxeter::polytope::{solve_dotted, PolytopeRecord, Verdict};

#[derive(Parser)]
#[command(name = "coxeter", version, about = "Compact hyperbolic Coxeter polytopes from their diagrams")]
struct Cli {
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a diagram: elliptic, parabolic, Lannér, hyperbolic, ...
    Classify { file: PathBuf },
    /// Verify a polytope diagram, solving unknown dotted weights.
    Check {
        #[arg(long)]
        dim: Option<usize>,
        file: PathBuf,
    },
    /// Enumerate polytopes with few pairs of disjoint facets.
    Enumerate(EnumerateArgs),
    /// Print the explicit bounds, optionally refining the label bound by search.
    Bounds(BoundsArgs),
    /// Search for dissections into two Coxeter polytopes.
    Dissect { file: PathBuf },
    /// Double a polytope along a facet (1-based).
    Double {
        file: PathBuf,
        #[arg(long)]
        facet: usize,
    },
    /// Volume of an even-dimensional polytope.
    Volume { file: PathBuf },
    /// Catalog maintenance.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Necessary conditions for `sub` to be a finite-index reflection subgroup of `sup`.
    Filter {
        #[arg(long)]
        sub: PathBuf,
        #[arg(long)]
        sup: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Load and verify every `.cox` file under a directory.
    Verify { dir: PathBuf },
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    dim: usize,
    /// Largest edge label.
    #[arg(long)]
    max_mult: u32,
    /// Largest number of facets.
    #[arg(long)]
    max_facets: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    limit_entries: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    General,
    Triangle,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    k: u32,
    /// Refined label bound to use in the facet bound.
    #[arg(long)]
    k0: Option<u32>,
    /// Run the zero-determinant search up to this label cap.
    #[arg(long)]
    refine: Option<u32>,
    #[arg(long, value_enum, default_value = "general")]
    shape: Shape,
}

/// Outcome of a subcommand that ran to completion.
enum Outcome {
    Ok,
    Negative,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("COXETER_TOL") {
        match v.parse::<f64>() {
            Ok(t) if set_zero_tol(t) => {}
            _ => {
                eprintln!("error: COXETER_TOL must be a positive number, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(n) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_err() {
            eprintln!("warning: thread pool already initialised");
        }
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Uncertified(_) | Error::ResourceLimit(_) | Error::NearZeroDenominator(_) => 3,
        Error::Gluing(_) | Error::Catalog { .. } | Error::NoSeed | Error::NotElliptic(_) | Error::NotGuaranteed(_) => 1,
        _ => 2,
    }
}

fn read_doc(path: &Path) -> Result<CoxDocument, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_cox(&text)
}

fn need_dim(doc: &CoxDocument, flag: Option<usize>) -> Result<usize, Error> {
    flag.or(doc.dim).ok_or_else(|| Error::Domain("no dimension: pass --dim or add a `dim` line".into()))
}

fn load_record(path: &Path) -> Result<PolytopeRecord, Error> {
    let doc = read_doc(path)?;
    let dim = need_dim(&doc, None)?;
    match solve_dotted(&doc.diagram, dim)? {
        Verdict::Accepted(r) => Ok(r),
        Verdict::Rejected(why) => Err(Error::InvalidDiagram(format!("{}: not a polytope diagram ({why})", path.display()))),
    }
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Classify { file } => {
            let d = read_doc(&file)?.diagram;
            let class = classify(&d)?;
            println!("class: {class}");
            println!("signature: {}", d.signature()?);
            println!("determinant: {:.12e}", d.determinant()?);
            if class == DiagramClass::Elliptic {
                let t = elliptic_type(&d)?;
                println!("type: {t}");
                println!("order: {}", t.group_order());
            }
            Ok(Outcome::Ok)
        }
        Command::Check { dim, file } => {
            let doc = read_doc(&file)?;
            let dim = need_dim(&doc, dim)?;
            match solve_dotted(&doc.diagram, dim) {
                Ok(Verdict::Accepted(r)) => {
                    println!("ACCEPT");
                    println!("vertices: {}", r.vertices.len());
                    print!("{}", r.diagram.to_cox(Some(dim)));
                    Ok(Outcome::Ok)
                }
                Ok(Verdict::Rejected(why)) => {
                    println!("REJECT: {why}");
                    Ok(Outcome::Negative)
                }
                Err(Error::NoSeed) => {
                    println!("REJECT: {}", Error::NoSeed);
                    Ok(Outcome::Negative)
                }
                Err(e) => Err(e),
            }
        }
        Command::Enumerate(args) => run_enumerate(args),
        Command::Bounds(args) => {
            let mut k0 = args.k0;
            if let Some(cap) = args.refine {
                let shape = match args.shape {
                    Shape::General => SearchShape::General,
                    Shape::Triangle => SearchShape::TriangleFace,
                };
                let r = refine_k_bound(&RefineConfig { d: args.dim, label_cap: cap, shape })?;
                println!("refined k: {}", r.max_label);
                println!("witnesses: {}", r.witnesses.len());
                if let Some(w) = r.witnesses.first() {
                    println!("top witness (det {:.3e}):", w.determinant);
                    print!("{}", w.diagram.to_cox(Some(args.dim)));
                }
                if r.cap_too_small {
                    println!("warning: the maximum equals the cap {cap}; raise the cap");
                }
                k0 = k0.or(Some(r.max_label)).filter(|&k| k >= 2);
            }
            print!("{}", bound_set(args.dim, args.k, k0)?);
            Ok(Outcome::Ok)
        }
        Command::Dissect { file } => {
            let r = load_record(&file)?;
            let ws = find_dissections(&r)?;
            if ws.is_empty() {
                println!("NONE");
                return Ok(Outcome::Negative);
            }
            for (i, w) in ws.iter().enumerate() {
                println!("witness {}: {w}", i + 1);
                for (j, p) in w.parts.iter().enumerate() {
                    println!("part {}:", j + 1);
                    print!("{}", p.diagram.to_cox(Some(r.dim)));
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Double { file, facet } => {
            let r = load_record(&file)?;
            if facet == 0 {
                return Err(Error::UnknownNode(0));
            }
            let d = double(&r, facet - 1)?;
            print!("{}", d.diagram.to_cox(Some(d.dim)));
            Ok(Outcome::Ok)
        }
        Command::Volume { file } => {
            let r = load_record(&file)?;
            println!("{:.15}", volume(&r)?);
            Ok(Outcome::Ok)
        }
        Command::Catalog { action: CatalogAction::Verify { dir } } => {
            let entries = load_catalog(&dir)?;
            for e in &entries {
                println!("OK {} ({}, d = {}, {} facets)", e.name, e.family, e.record.dim, e.record.facets());
            }
            println!("{} entries verified", entries.len());
            Ok(Outcome::Ok)
        }
        Command::Filter { sub, sup } => {
            let p = load_entry(&sub).map(|e| e.record).or_else(|_| load_record(&sub))?;
            let f = load_entry(&sup).map(|e| e.record).or_else(|_| load_record(&sup))?;
            match subgroup_filter(&p, &f)? {
                FilterVerdict::Possible { volume_ratio } => {
                    match volume_ratio {
                        Some(x) => println!("possible (volume ratio {x:.9})"),
                        None => println!("possible"),
                    }
                    Ok(Outcome::Ok)
                }
                FilterVerdict::Impossible(reason) => {
                    println!("impossible: {reason}");
                    Ok(Outcome::Negative)
                }
            }
        }
    }
}

fn found_file(f: &Found, index: usize, d: usize) -> (String, String) {
    let name = format!("P{:04}-n{}-p{}", index + 1, f.facets(), f.dotted());
    let doc = CoxDocument {
        meta: vec![
            ("name".into(), name.clone()),
            ("form".into(), f.form.digest()),
            ("stage".into(), f.stage.clone()),
        ],
        dim: Some(d),
        diagram: f.record.diagram.renumbered(),
    };
    (format!("{name}.cox"), doc.to_string())
}

fn run_enumerate(args: EnumerateArgs) -> Result<Outcome, Error> {
    let start = Instant::now();
    let cfg = EnumConfig {
        d: args.dim,
        k_max: args.max_mult,
        n_max: args.max_facets,
        limit_entries: args.limit_entries,
        time_limit: args.time_limit.map(Duration::from_secs),
    };
    let result: EnumResult = enumerate_p(&cfg)?;
    let out = &args.out;
    fs::create_dir_all(out.join("other"))?;

    let mut files: Vec<(String, String)> = Vec::new();
    let mut listing = String::new();
    for (i, f) in result.members.iter().enumerate() {
        let (name, text) = found_file(f, i, cfg.d);
        let _ = writeln!(listing, "{} n={} p={} stage={} file={name}", f.form.digest(), f.facets(), f.dotted(), f.stage);
        files.push((name, text));
    }
    for (i, f) in result.others.iter().enumerate() {
        let (name, text) = found_file(f, i, cfg.d);
        let name = format!("other/{name}");
        let _ = writeln!(listing, "{} n={} p={} stage={} file={name} (not in the class: p > n - d - 2)", f.form.digest(), f.facets(), f.dotted(), f.stage);
        files.push((name, text));
    }
    for (name, text) in &files {
        fs::write(out.join(name), text)?;
    }

    let mut manifest = String::new();
    let argv: Vec<String> = std::env::args().collect();
    let _ = writeln!(manifest, "command: {}", argv.join(" "));
    let _ = writeln!(manifest, "version: {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        manifest,
        "config: d={} max_mult={} max_facets={} limit_entries={} time_limit={}",
        cfg.d,
        cfg.k_max,
        cfg.n_max,
        args.limit_entries.map_or("none".into(), |v| v.to_string()),
        args.time_limit.map_or("none".into(), |v| format!("{v}s"))
    );
    let _ = writeln!(manifest, "wall_time: {:.3}s", start.elapsed().as_secs_f64());
    for (stage, count) in &result.stage_counts {
        let _ = writeln!(manifest, "stage {stage}: {count}");
    }
    let _ = writeln!(manifest, "polytopes: {} in the class, {} other", result.members.len(), result.others.len());
    manifest.push_str(&listing);
    for (name, text) in &files {
        let hex: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        let _ = writeln!(manifest, "sha256 {hex} {name}");
    }
    fs::write(out.join("manifest.txt"), &manifest)?;
    println!(
        "{} polytopes in the class, {} other polytope diagrams; written to {}",
        result.members.len(),
        result.others.len(),
        out.display()
    );
    Ok(Outcome::Ok)
}
