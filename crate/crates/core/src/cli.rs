//! The `nsplit` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde_json::json;

use crate::codec::{checksum, reconstruct, split_file};
use crate::container::{expected_payload_len, parse_module, ModuleHeader, MAGIC, VERSION};
use crate::error::CodecError;
use crate::layout::EffectiveLayout;
use crate::reliability::{exact_reliability, simulate};
use crate::scheme::{
    base_of, derive_characteristics, family, format_percent, is_base, savings, SchemeParams,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CHECKSUM: i32 = 4;
pub const EXIT_INCONSISTENT: i32 = 5;
pub const EXIT_MALFORMED: i32 = 6;
pub const EXIT_EXISTS: i32 = 7;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  1  I/O error
  2  usage error or invalid scheme
  3  modules do not cover every element (missing ids are listed)
  4  checksum mismatch after reconstruction
  5  modules disagree on scheme, flags, length or checksum, or repeat a position
  6  malformed module file
  7  output file exists (pass --force to overwrite)";

#[derive(Parser, Debug)]
#[command(
    name = "nsplit",
    version,
    about = "Split a file into n modules so that any m of them rebuild it",
    after_help = EXIT_CODES_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct SchemeArgs {
    /// Number of modules
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=65535))]
    n: u32,
    /// Number of modules that must suffice to rebuild
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=65535))]
    m: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write FILE.mod001 .. FILE.modNNN
    Split {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Use the reordered layout where consecutive modules suffice
        #[arg(long)]
        optimized: bool,
        /// Directory for the module files (default: next to FILE)
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        file: PathBuf,
    },
    /// Rebuild the original file from module files
    Join {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
        #[arg(required = true)]
        modules: Vec<PathBuf>,
    },
    /// Print a module's header
    Inspect {
        #[arg(long)]
        json: bool,
        module: PathBuf,
    },
    /// Print the element layout table
    Table {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        optimized: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print derived characteristics, similar schemes and savings
    Analyze {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Per-module availability; adds the exact reliability
        #[arg(long)]
        p: Option<f64>,
        /// Largest n listed among similar schemes
        #[arg(long, default_value_t = 100)]
        max_n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Monte-Carlo estimate of reliability and element coverage
    Simulate {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::new(EXIT_IO, err.to_string())
    }
}

fn codec_failure(err: CodecError) -> Failure {
    let code = match &err {
        CodecError::Infeasible(_) => EXIT_INFEASIBLE,
        CodecError::ChecksumMismatch { .. } => EXIT_CHECKSUM,
        CodecError::InconsistentHeaders(_) | CodecError::DuplicatePosition(_) => EXIT_INCONSISTENT,
        CodecError::Format(_) => EXIT_MALFORMED,
        CodecError::SchemeTooLarge { .. } => EXIT_USAGE,
        _ => EXIT_IO,
    };
    let message = match &err {
        CodecError::Infeasible(missing) => format!(
            "cannot reconstruct, missing element ids: {}",
            missing
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        ),
        _ => err.to_string(),
    };
    Failure::new(code, message)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return if err.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(stderr, "nsplit: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Split {
            scheme,
            optimized,
            out_dir,
            force,
            file,
        } => cmd_split(scheme, optimized, out_dir, force, &file, out),
        Command::Join {
            out: target,
            force,
            modules,
        } => cmd_join(&target, force, &modules, out),
        Command::Inspect { json, module } => cmd_inspect(&module, json, out),
        Command::Table {
            scheme,
            optimized,
            json,
        } => cmd_table(scheme, optimized, json, out),
        Command::Analyze {
            scheme,
            p,
            max_n,
            json,
        } => cmd_analyze(scheme, p, max_n, json, out),
        Command::Simulate {
            scheme,
            p,
            trials,
            seed,
            json,
        } => cmd_simulate(scheme, p, trials, seed, json, out),
    }
}

fn params(scheme: SchemeArgs) -> Result<SchemeParams, Failure> {
    SchemeParams::new(scheme.n, scheme.m).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))
}

/// `FILE.mod001`; the width grows past three digits when `n > 999`.
pub fn module_file_name(file_name: &str, position: u32, n: u32) -> String {
    let width = n.to_string().len().max(3);
    format!("{file_name}.mod{position:0width$}")
}

fn ratio_string(value: Ratio<u64>) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn cmd_split(
    scheme: SchemeArgs,
    optimized: bool,
    out_dir: Option<PathBuf>,
    force: bool,
    file: &Path,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = params(scheme)?;
    let data = fs::read(file).map_err(|e| Failure::io(file, e))?;
    let file_name = file
        .file_name()
        .ok_or_else(|| Failure::new(EXIT_USAGE, format!("{} is not a file", file.display())))?
        .to_string_lossy()
        .into_owned();
    let dir = out_dir.unwrap_or_else(|| file.parent().map(Path::to_path_buf).unwrap_or_default());
    let targets: Vec<PathBuf> = (1..=params.n())
        .map(|pos| dir.join(module_file_name(&file_name, pos, params.n())))
        .collect();
    if !force {
        if let Some(existing) = targets.iter().find(|t| t.exists()) {
            return Err(Failure::new(
                EXIT_EXISTS,
                format!("{} exists (use --force)", existing.display()),
            ));
        }
    }

    let modules = split_file(&data, params, optimized).map_err(codec_failure)?;
    let c = derive_characteristics(params);
    writeln!(
        out,
        "scheme {params}: R={} K={} Z={} D={} optimized={}",
        c.big_r,
        c.k,
        c.redundancy_z,
        c.min_modules_d,
        if optimized { "yes" } else { "no" }
    )?;
    writeln!(
        out,
        "original: {} bytes, crc32 {:08x}",
        data.len(),
        checksum(&data)
    )?;
    for (target, module) in targets.iter().zip(&modules) {
        fs::write(target, module).map_err(|e| Failure::io(target, e))?;
        writeln!(
            out,
            "{}: {} bytes payload",
            target.display(),
            module.len() - crate::container::HEADER_LEN
        )?;
    }
    Ok(())
}

fn cmd_join(
    target: &Path,
    force: bool,
    paths: &[PathBuf],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if !force && target.exists() {
        return Err(Failure::new(
            EXIT_EXISTS,
            format!("{} exists (use --force)", target.display()),
        ));
    }
    let files = paths
        .iter()
        .map(|p| fs::read(p).map_err(|e| Failure::io(p, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let modules = files
        .iter()
        .zip(paths)
        .map(|(bytes, path)| {
            parse_module(bytes)
                .map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let data = reconstruct(&modules).map_err(codec_failure)?;
    fs::write(target, &data).map_err(|e| Failure::io(target, e))?;
    writeln!(
        out,
        "wrote {} ({} bytes) from {} modules",
        target.display(),
        data.len(),
        modules.len()
    )?;
    Ok(())
}

fn cmd_inspect(path: &Path, as_json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let (header, payload) = parse_module(&bytes)
        .map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    let elements = module_elements(&header)?;
    if as_json {
        let value = json!({
            "magic": String::from_utf8_lossy(&MAGIC),
            "version": VERSION,
            "flags": header.flags,
            "optimized": header.is_optimized(),
            "n": header.n,
            "m": header.m,
            "position": header.position,
            "original_length": header.original_length,
            "checksum": format!("{:08x}", header.checksum),
            "payload_length": payload.len(),
            "elements": elements,
        });
        writeln!(out, "{value:#}")?;
    } else {
        writeln!(out, "magic:           NSP1")?;
        writeln!(out, "version:         {VERSION}")?;
        writeln!(
            out,
            "flags:           {:#04x} ({})",
            header.flags,
            if header.is_optimized() {
                "optimized"
            } else {
                "plain"
            }
        )?;
        writeln!(out, "scheme:          ({}, {})", header.n, header.m)?;
        writeln!(out, "position:        {}", header.position)?;
        writeln!(out, "original length: {}", header.original_length)?;
        writeln!(out, "checksum:        {:08x}", header.checksum)?;
        writeln!(out, "payload length:  {}", payload.len())?;
        writeln!(
            out,
            "elements:        {}",
            elements
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        )?;
    }
    Ok(())
}

fn module_elements(header: &ModuleHeader) -> Result<Vec<u32>, Failure> {
    let malformed = |e: String| Failure::new(EXIT_MALFORMED, e);
    expected_payload_len(header).map_err(|e| malformed(e.to_string()))?;
    let params = header.params().map_err(|e| malformed(e.to_string()))?;
    EffectiveLayout::new(params, header.is_optimized())
        .and_then(|l| l.row(u32::from(header.position)))
        .map_err(|e| malformed(e.to_string()))
}

fn cmd_table(
    scheme: SchemeArgs,
    optimized: bool,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = params(scheme)?;
    let table = EffectiveLayout::new(params, optimized)
        .and_then(|l| l.table())
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if as_json {
        writeln!(out, "{}", table.to_json())?;
    } else {
        write!(out, "{}", table.render_text())?;
    }
    Ok(())
}

fn cmd_analyze(
    scheme: SchemeArgs,
    p: Option<f64>,
    max_n: u32,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = params(scheme)?;
    let c = derive_characteristics(params);
    let base = base_of(params);
    let members = family(params, max_n);
    let sv = savings(params);
    let reliability = p
        .map(|p| exact_reliability(params, p).map(|v| (p, v)))
        .transpose()
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;

    if as_json {
        let mut value = json!({
            "params": params,
            "R": c.big_r,
            "K": c.k,
            "Z": c.redundancy_z,
            "ml": ratio_string(c.module_ratio_ml),
            "D": c.min_modules_d,
            "base": base,
            "is_base": is_base(params),
            "family": members,
            "pr1_percent": ratio_string(sv.pr1_percent),
            "pr2_percent": ratio_string(sv.pr2_percent),
        });
        if let Some((p, v)) = reliability {
            value["reliability"] = json!({ "p": p, "exact_threshold": v });
        }
        writeln!(out, "{value:#}")?;
        return Ok(());
    }

    writeln!(out, "scheme {params}")?;
    writeln!(out, "R={}", c.big_r)?;
    writeln!(out, "K={}", c.k)?;
    writeln!(out, "Z={}", c.redundancy_z)?;
    writeln!(out, "ml={}", ratio_string(c.module_ratio_ml))?;
    writeln!(out, "D={}", c.min_modules_d)?;
    writeln!(
        out,
        "base={base}{}",
        if is_base(params) {
            " (this scheme is base)"
        } else {
            ""
        }
    )?;
    writeln!(
        out,
        "similar (n <= {max_n}): {}",
        members
            .iter()
            .map(SchemeParams::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    writeln!(out, "Pr1={}", format_percent(sv.pr1_percent))?;
    writeln!(out, "Pr2={}", format_percent(sv.pr2_percent))?;
    if let Some((p, v)) = reliability {
        writeln!(out, "P(p={p})={v}")?;
    }
    Ok(())
}

fn cmd_simulate(
    scheme: SchemeArgs,
    p: f64,
    trials: u64,
    seed: u64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let params = params(scheme)?;
    let report =
        simulate(params, p, trials, seed).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if as_json {
        let value =
            serde_json::to_value(&report).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        writeln!(out, "{value:#}")?;
    } else {
        writeln!(out, "scheme {params}, p={p}, trials={trials}, seed={seed}")?;
        writeln!(
            out,
            "exact threshold P(n,m) = {:.6}",
            report.exact_threshold
        )?;
        writeln!(
            out,
            "simulated threshold    = {:.6} +/- {:.6}",
            report.mc_threshold.estimate, report.mc_threshold.stderr
        )?;
        writeln!(
            out,
            "simulated coverage     = {:.6} +/- {:.6}",
            report.mc_coverage.estimate, report.mc_coverage.stderr
        )?;
    }
    Ok(())
}
