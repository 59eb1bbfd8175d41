use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use fixposit::codec::{from_binary32, RoundingMode};
use fixposit::format::{enumerate_ieee_equivalent, validate, SWEEP_WIDTHS};
use fixposit::metrics::{sweep_conversion_error, ErrorReport, SampleDistribution};
use fixposit::multiplier::{mul_datapath_traced, DatapathTrace};
use fixposit::report::RunReport;
use fixposit::workloads::pgm::GrayImage;
use fixposit::workloads::sobel;
use fixposit::workloads::trace::OperandTrace;
use fixposit::workloads::{run_workload_full, Substitution, Workload, WorkloadParams, WorkloadResult};
use fixposit::{Decoded, FixedPositFormat, PositFormat, PositWord, DEFAULT_SEED};

macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(name = "fixposit", version, about = "Fixed-posit format workbench")]
struct Cli {
    /// Print a JSON report instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List formats with the binary32 exponent range.
    Enumerate(EnumerateArgs),
    /// Convert a binary32 value to a fixed-posit word.
    Convert(ConvertArgs),
    /// Multiply two operands through the datapath model.
    Mul(MulArgs),
    /// Measure binary32 round-trip conversion error.
    Sweep(SweepArgs),
    /// Run a kernel natively and with substituted multiplication.
    Workload(WorkloadArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WidthChoice {
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    all_paper_widths: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    choice: WidthChoice,
}

#[derive(Args)]
struct ConvertArgs {
    /// Format as `N,es,rs`.
    #[arg(long)]
    fmt: FixedPositFormat,
    /// Decimal, `0x` binary32 bit pattern, `nan` or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    value: String,
    #[arg(long, default_value_t = RoundingMode::NearestEven)]
    rounding: RoundingMode,
}

#[derive(Args)]
struct MulArgs {
    #[arg(long)]
    fmt: FixedPositFormat,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    /// Treat `--a` and `--b` as raw word bit patterns (hex).
    #[arg(long)]
    words: bool,
    /// Include the intermediate datapath values.
    #[arg(long)]
    trace_datapath: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with = "all_paper_widths", required_unless_present = "all_paper_widths")]
    fmt: Vec<FixedPositFormat>,
    /// Every format listed by `enumerate --all-paper-widths`.
    #[arg(long)]
    all_paper_widths: bool,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = SampleDistribution::LogUniform)]
    dist: SampleDistribution,
    #[arg(long, default_value_t = RoundingMode::NearestEven)]
    rounding: RoundingMode,
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long)]
    name: Workload,
    #[arg(long, conflicts_with_all = ["sweep_widths", "posit"])]
    fmt: Option<FixedPositFormat>,
    /// Run every `(N, 6, 2)` for N in 18, 20, ..., 32.
    #[arg(long, conflicts_with = "posit")]
    sweep_widths: bool,
    /// Substitute a standard `(N, es)` posit instead.
    #[arg(long)]
    posit: Option<PositFormat>,
    #[arg(long, default_value_t = 200)]
    size: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = RoundingMode::NearestEven)]
    rounding: RoundingMode,
    /// Write the substituted run's multiplier operands here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// PGM (P5) input for sobel.
    #[arg(long)]
    image: Option<PathBuf>,
    /// Write the substituted sobel output as PGM.
    #[arg(long)]
    image_out: Option<PathBuf>,
}

fn parse_binary32(s: &str) -> anyhow::Result<u32> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("nan") {
        return Ok(0x7FC0_0000);
    }
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        return u32::from_str_radix(hex, 16).with_context(|| format!("bad binary32 bit pattern `{s}`"));
    }
    let v: f32 = t.parse().with_context(|| format!("bad value `{s}`"))?;
    Ok(v.to_bits())
}

fn parse_word(s: &str, fmt: FixedPositFormat) -> anyhow::Result<PositWord> {
    let t = s.trim();
    let hex = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    let bits = u64::from_str_radix(hex, 16).with_context(|| format!("bad word `{s}`"))?;
    Ok(PositWord::new(bits, fmt)?)
}

fn hex_word(w: &PositWord) -> String {
    w.to_string()
}

#[derive(Serialize)]
struct FormatRow {
    format: FixedPositFormat,
    n: u32,
    es: u32,
    rs: u32,
    fraction_bits: u32,
    min_scale: i32,
    max_scale: i32,
}

#[derive(Serialize)]
struct WordInfo {
    word: String,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fraction: Option<String>,
    value: Option<f64>,
    binary32: String,
}

impl WordInfo {
    fn of(w: &PositWord) -> Self {
        let es = w.layout().exponent_bits();
        let f = w.layout().fraction_bits();
        let mut info = WordInfo {
            word: hex_word(w),
            kind: "zero",
            negative: None,
            k: None,
            exponent: None,
            scale: None,
            fraction: None,
            value: Some(0.0),
            binary32: format!("0x{:08X}", w.to_binary32(RoundingMode::NearestEven)),
        };
        match w.decode() {
            Decoded::Zero => {}
            Decoded::NaR => {
                info.kind = "nar";
                info.value = None;
            }
            Decoded::Normal(n) => {
                info.kind = "normal";
                info.negative = Some(n.negative);
                info.k = Some(n.scale.div_euclid(1 << es));
                info.exponent = Some(n.scale.rem_euclid(1 << es));
                info.scale = Some(n.scale);
                let frac = n.fraction() << (f - n.frac_bits);
                info.fraction = Some(format!("0x{:0width$X}", frac, width = f.div_ceil(4) as usize));
                info.value = w.to_binary64().ok();
            }
        }
        info
    }

    fn line(&self) -> String {
        let mut s = format!("{} {}", self.word, self.kind);
        if let (Some(neg), Some(k), Some(e), Some(sc), Some(fr)) =
            (self.negative, self.k, self.exponent, self.scale, &self.fraction)
        {
            s += &format!(" sign={} k={k} e={e} scale={sc} fraction={fr}", u8::from(neg));
        }
        if let Some(v) = self.value {
            s += &format!(" value={v:e}");
        }
        s + &format!(" binary32={}", self.binary32)
    }
}

#[derive(Serialize)]
struct ConvertResult {
    input: String,
    input_bits: String,
    rounding: RoundingMode,
    #[serde(flatten)]
    word: WordInfo,
}

#[derive(Serialize)]
struct MulResult {
    a: WordInfo,
    b: WordInfo,
    product: WordInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<DatapathTrace>,
}

#[derive(Serialize)]
struct SweepResult {
    format: FixedPositFormat,
    distribution: SampleDistribution,
    rounding: RoundingMode,
    samples: u64,
    #[serde(flatten)]
    report: ErrorReport,
}

fn enumerate(cli_json: bool, args: &EnumerateArgs, command: Vec<String>, start: Instant) -> anyhow::Result<()> {
    let widths: Vec<u32> = match args.choice.width {
        Some(w) => {
            if w == 0 || w > fixposit::format::MAX_WIDTH {
                bail!("width must be between 1 and {}", fixposit::format::MAX_WIDTH);
            }
            vec![w]
        }
        None => SWEEP_WIDTHS.to_vec(),
    };
    let rows: Vec<FormatRow> = widths
        .iter()
        .flat_map(|&w| enumerate_ieee_equivalent(w))
        .map(|f| {
            let r = f.scale_range();
            FormatRow {
                format: f,
                n: f.width(),
                es: f.exponent_bits(),
                rs: f.regime_bits(),
                fraction_bits: f.fraction_bits(),
                min_scale: r.min_scale,
                max_scale: r.max_scale,
            }
        })
        .collect();
    if cli_json {
        let formats = rows.iter().map(|r| r.format.as_triple().to_vec()).collect();
        let report = RunReport::new(command, formats, None, rows, elapsed_ms(start));
        out!("{}", report.to_json());
    } else {
        out!("{:>4} {:>3} {:>4} {:>5} {:>10}", "N", "es", "rs", "frac", "scale");
        for r in &rows {
            out!("{:>4} {:>3} {:>4} {:>5} {:>10}", r.n, r.es, r.rs, r.fraction_bits, format!("[{}, {}]", r.min_scale, r.max_scale));
        }
        out!("{} formats", rows.len());
    }
    Ok(())
}

fn convert(cli_json: bool, args: &ConvertArgs, command: Vec<String>, start: Instant) -> anyhow::Result<()> {
    let bits = parse_binary32(&args.value)?;
    let w = from_binary32(bits, args.fmt, args.rounding);
    let result = ConvertResult {
        input: args.value.clone(),
        input_bits: format!("0x{bits:08X}"),
        rounding: args.rounding,
        word: WordInfo::of(&w),
    };
    if cli_json {
        let report = RunReport::new(command, vec![args.fmt.as_triple().to_vec()], None, vec![result], elapsed_ms(start));
        out!("{}", report.to_json());
    } else {
        out!("{} {}", args.fmt, result.word.line());
    }
    Ok(())
}

fn mul(cli_json: bool, args: &MulArgs, command: Vec<String>, start: Instant) -> anyhow::Result<()> {
    let rm = RoundingMode::NearestEven;
    let (a, b) = if args.words {
        (parse_word(&args.a, args.fmt)?, parse_word(&args.b, args.fmt)?)
    } else {
        (
            from_binary32(parse_binary32(&args.a)?, args.fmt, rm),
            from_binary32(parse_binary32(&args.b)?, args.fmt, rm),
        )
    };
    let (c, trace) = mul_datapath_traced(&a, &b, rm)?;
    let result = MulResult {
        a: WordInfo::of(&a),
        b: WordInfo::of(&b),
        product: WordInfo::of(&c),
        trace: if args.trace_datapath { trace } else { None },
    };
    if cli_json {
        let report = RunReport::new(command, vec![args.fmt.as_triple().to_vec()], None, vec![result], elapsed_ms(start));
        out!("{}", report.to_json());
    } else {
        out!("a = {}", result.a.line());
        out!("b = {}", result.b.line());
        out!("a*b = {}", result.product.line());
        if args.trace_datapath {
            match &result.trace {
                Some(t) => out!("{}", serde_json::to_string_pretty(t)?),
                None => out!("(no datapath trace for special operands)"),
            }
        }
    }
    Ok(())
}

fn sweep(cli_json: bool, args: &SweepArgs, command: Vec<String>, start: Instant) -> anyhow::Result<()> {
    let formats: Vec<FixedPositFormat> = if args.all_paper_widths {
        SWEEP_WIDTHS.iter().flat_map(|&w| enumerate_ieee_equivalent(w)).collect()
    } else {
        args.fmt.clone()
    };
    let results = formats
        .iter()
        .map(|&f| {
            let report = sweep_conversion_error(f, args.samples as usize, args.seed, args.dist, args.rounding)?;
            Ok(SweepResult { format: f, distribution: args.dist, rounding: args.rounding, samples: args.samples, report })
        })
        .collect::<fixposit::Result<Vec<_>>>()?;
    if cli_json {
        let fm = formats.iter().map(|f| f.as_triple().to_vec()).collect();
        let report = RunReport::new(command, fm, Some(args.seed), results, elapsed_ms(start));
        out!("{}", report.to_json());
    } else {
        out!("{:<14} {:>12} {:>12} {:>8}", "format", "max_rel_%", "mean_rel_%", "skipped");
        for r in &results {
            out!(
                "{:<14} {:>12.3e} {:>12.3e} {:>8}",
                r.format.to_string(),
                r.report.max_rel_err_pct,
                r.report.mean_rel_err_pct,
                r.report.skipped
            );
        }
    }
    Ok(())
}

fn workload(cli_json: bool, args: &WorkloadArgs, command: Vec<String>, start: Instant) -> anyhow::Result<()> {
    let subs: Vec<Substitution> = if args.sweep_widths {
        SWEEP_WIDTHS.iter().map(|&n| validate(n, 6, 2).map(Substitution::Fixed)).collect::<Result<_, _>>()?
    } else if let Some(p) = args.posit {
        vec![Substitution::Posit(p)]
    } else if let Some(f) = args.fmt {
        vec![Substitution::Fixed(f)]
    } else {
        vec![Substitution::Reference]
    };
    if subs.len() > 1 && (args.trace_out.is_some() || args.image_out.is_some()) {
        bail!("--trace-out and --image-out need a single format");
    }
    if args.image_out.is_some() && args.name != Workload::Sobel {
        bail!("--image-out applies to sobel only");
    }

    let mut params = WorkloadParams::new(args.size, args.seed);
    params.rounding = args.rounding;
    if let Some(path) = &args.image {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        params.image = Some(GrayImage::read_pgm(BufReader::new(file))?);
    }

    let results: Vec<WorkloadResult> = if subs.len() == 1 {
        let mut trace = args.trace_out.as_ref().map(|_| OperandTrace::new());
        let run = run_workload_full(args.name, subs[0], &params, trace.as_mut())?;
        if let (Some(path), Some(t)) = (&args.trace_out, &trace) {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            t.write_to(BufWriter::new(file))?;
        }
        if let (Some(path), Some((w, h))) = (&args.image_out, run.dims) {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            sobel::to_image(w, h, &run.output).write_pgm(BufWriter::new(file))?;
        }
        vec![run.result]
    } else {
        subs.par_iter()
            .map(|&s| run_workload_full(args.name, s, &params, None).map(|r| r.result))
            .collect::<fixposit::Result<_>>()?
    };

    if cli_json {
        let formats = subs
            .iter()
            .filter_map(|s| match s {
                Substitution::Reference => None,
                Substitution::Fixed(f) => Some(f.as_triple().to_vec()),
                Substitution::Posit(p) => Some(vec![p.width(), p.exponent_bits()]),
            })
            .collect();
        let report = RunReport::new(command, formats, Some(args.seed), results, elapsed_ms(start));
        out!("{}", report.to_json());
    } else {
        out!("{:<14} {:<14} {:<20} {:>12} {:>12} {:>12}", "workload", "format", "metric", "quality", "mean_rel_%", "muls");
        for r in &results {
            out!(
                "{:<14} {:<14} {:<20} {:>12.4e} {:>12.4e} {:>12}",
                r.workload, r.format, r.quality_metric, r.quality, r.error.mean_rel_err_pct, r.multiplications
            );
        }
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn main() -> ExitCode {
    let start = Instant::now();
    let command: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Enumerate(a) => enumerate(cli.json, a, command, start),
        Command::Convert(a) => convert(cli.json, a, command, start),
        Command::Mul(a) => mul(cli.json, a, command, start),
        Command::Sweep(a) => sweep(cli.json, a, command, start),
        Command::Workload(a) => workload(cli.json, a, command, start),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
