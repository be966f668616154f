//! wangkit: build, check and render structured Wang tilings from the
//! command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wangkit::formats;
use wangkit::render::{self, Layers, RenderSpec, Target};
use wangkit_core::hierarchy::{self, NullSink, PolyReboot, SimConfig, Verdict};
use wangkit_core::kolmo::{self, KolmoParams};
use wangkit_core::selfsim::{self, ChoiceSequence, CornerOrientation, DegenerateStyle};
use wangkit_core::channels;
use wangkit_core::stripes::{self, StripeConfig, StripePalette};
use wangkit_core::tiler::{self, TilerConfig};
use wangkit_core::tm::{self, CompileOptions};

#[derive(Parser)]
#[command(name = "wangkit", version, about = "Wang tiling construction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Exit status 1 marks a negative domain answer rather than an error.
struct DomainFailure(String);

#[derive(Subcommand)]
enum Command {
    /// Build the canonical 2^k square tiling of a palette.
    Solve(SolveArgs),
    /// Profile subsquare complexity of a tiling.
    Profile(ProfileArgs),
    /// Count distinct n-by-n subsquares of a tiling.
    Count(CountArgs),
    /// Compile a Turing machine into a tile set.
    CompileTm(CompileTmArgs),
    /// Build a greedy high-complexity bit sequence.
    Seq(SeqArgs),
    /// List forbidden (compressible) strings in canonical order.
    Forbidden(ForbiddenArgs),
    /// Generate and optionally verify a self-similar pattern window.
    Selfsim(SelfsimArgs),
    /// Enumerate or count communication channels.
    Channels(ChannelsArgs),
    /// Decide stripe languages or run boundary-aware cellular automata.
    Stripe(StripeArgs),
    /// Run the hierarchical complexity check over an input window.
    Hier(HierArgs),
    /// Render a tiling to SVG or PPM.
    Render(RenderArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Palette file.
    #[arg(long)]
    palette: PathBuf,
    /// Square side exponent: the grid is 2^k by 2^k.
    #[arg(long)]
    k: u32,
    /// Output tiling file.
    #[arg(long)]
    out: PathBuf,
    /// Raise the default side cap of 16.
    #[arg(long, default_value_t = 16)]
    max_side: usize,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    palette: PathBuf,
    #[arg(long)]
    tiling: PathBuf,
    /// Complexity proxy: "compress" (byte-pair) or "vm" (program index).
    #[arg(long, default_value = "compress")]
    oracle: String,
    /// Program length cap for the vm oracle.
    #[arg(long = "L", default_value_t = 14)]
    program_cap: u32,
    /// Step budget for the vm oracle.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    palette: PathBuf,
    #[arg(long)]
    tiling: PathBuf,
    /// Subsquare side.
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct CompileTmArgs {
    /// Machine file.
    #[arg(long)]
    tm: PathBuf,
    /// Compile the two-track variant with read-only input bits.
    #[arg(long)]
    double_tape: bool,
    /// Output palette file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4096)]
    tile_budget: usize,
}

#[derive(Args)]
struct SeqArgs {
    /// Complexity threshold as a fraction, e.g. 1/4.
    #[arg(long, default_value = "1/4")]
    c: String,
    /// Block length.
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Target length (multiple of the block length).
    #[arg(long, default_value_t = 64)]
    len: usize,
    /// Program length cap for the index.
    #[arg(long = "L", default_value_t = 20)]
    program_cap: u32,
    #[arg(long, default_value_t = 10_000)]
    vm_budget: u64,
}

#[derive(Args)]
struct ForbiddenArgs {
    #[arg(long, default_value = "1/2")]
    c: String,
    /// How many strings to print.
    #[arg(long, default_value_t = 100)]
    take: usize,
    #[arg(long = "L", default_value_t = 14)]
    program_cap: u32,
    #[arg(long, default_value_t = 10_000)]
    vm_budget: u64,
}

#[derive(Args)]
struct SelfsimArgs {
    /// Grouping choices as HEX:HEX (horizontal:vertical bits).
    #[arg(long, default_value = "0:0")]
    choices: String,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    /// Highest square rank.
    #[arg(long, default_value_t = 5)]
    rank: u8,
    #[arg(long, default_value_t = 0)]
    x0: i64,
    #[arg(long, default_value_t = 0)]
    y0: i64,
    /// Write an SVG rendering here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Check the window against the allowed-cross catalog.
    #[arg(long)]
    verify: bool,
    /// Paint a single separating line dark instead of light.
    #[arg(long, default_value_t = true)]
    separator_dark: bool,
    /// Corner orientation for doubly degenerate windows.
    #[arg(long, default_value = "ne")]
    corner: String,
}

#[derive(Args)]
struct ChannelsArgs {
    /// Subgrid rank.
    #[arg(long)]
    k: u8,
    /// List the subgrid lines of zone 0.
    #[arg(long)]
    enumerate: bool,
    /// Print the exact channel count per zone.
    #[arg(long)]
    count: bool,
}

#[derive(Args)]
struct StripeArgs {
    /// Stripe palette file (tiles must carry bits; side colors named L/R or
    /// taken from --left/--right).
    #[arg(long)]
    palette: Option<PathBuf>,
    #[arg(long)]
    left: Option<String>,
    #[arg(long)]
    right: Option<String>,
    /// Decide whether this bit string is spelled by some stripe tiling.
    #[arg(long)]
    decide: Option<String>,
    /// Run a built-in cellular automaton: identity, shift-left, or
    /// selfstab.
    #[arg(long)]
    ca: Option<String>,
    #[arg(long, default_value_t = 6)]
    width: usize,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Initial row: state ids for identity/shift-left, input bits for
    /// selfstab.
    #[arg(long)]
    init: Option<String>,
    /// Counter radix for selfstab.
    #[arg(long, default_value_t = 4)]
    base: u16,
    #[arg(long, default_value_t = 8)]
    width_cap: usize,
}

#[derive(Args)]
struct HierArgs {
    /// Bit file holding the 2^(rank+1) input bits.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rank: u8,
    #[arg(long, default_value = "1/2")]
    c: String,
    #[arg(long, default_value_t = 1_000_000)]
    ticks: u64,
    /// Grouping choices as HEX:HEX; nonzero horizontal bits may split the
    /// window.
    #[arg(long, default_value = "0:0")]
    choices: String,
    /// Write the event log here, one JSON object per line.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long = "L", default_value_t = 14)]
    program_cap: u32,
    #[arg(long, default_value_t = 10_000)]
    vm_budget: u64,
    /// Restart cursors every coeff*zone^exp ticks, e.g. 2,3.
    #[arg(long)]
    poly_reboot: Option<String>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    palette: PathBuf,
    #[arg(long)]
    tiling: PathBuf,
    /// Output path; .svg and .ppm are understood.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 12)]
    cell_px: u32,
    /// Comma-separated layers: tiles, edges, ranks, channels, zones.
    #[arg(long, default_value = "tiles")]
    layers: String,
}

fn parse_fraction(s: &str) -> Result<(u32, u32)> {
    let (n, d) = s.split_once('/').ok_or_else(|| anyhow!("expected a fraction like 1/4"))?;
    Ok((n.trim().parse()?, d.trim().parse()?))
}

fn parse_choices(s: &str, rank: u8) -> Result<ChoiceSequence> {
    let (h, v) = s.split_once(':').ok_or_else(|| anyhow!("expected HEX:HEX"))?;
    let h = u32::from_str_radix(h.trim_start_matches("0x"), 16).context("horizontal choices")?;
    let v = u32::from_str_radix(v.trim_start_matches("0x"), 16).context("vertical choices")?;
    Ok(ChoiceSequence::new(rank, h, v))
}

fn parse_bit_string(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            c => bail!("expected 0/1, got {:?}", c),
        })
        .collect()
}

fn load_palette(path: &PathBuf) -> Result<wangkit_core::Palette> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    formats::parse_palette(&text)
}

fn run(cli: Cli) -> Result<std::result::Result<(), DomainFailure>> {
    match cli.command {
        Command::Solve(a) => {
            let p = load_palette(&a.palette)?;
            let cfg = TilerConfig { max_side: a.max_side };
            match tiler::build_good_square(&p, a.k, &cfg) {
                Ok(g) => {
                    fs::write(&a.out, formats::serialize_tiling(&p, &g))?;
                    println!("solved: {}x{} written to {}", g.width, g.height, a.out.display());
                    Ok(Ok(()))
                }
                Err(e @ tiler::TilerError::NoTiling { .. }) => Ok(Err(DomainFailure(e.to_string()))),
                Err(e) => Err(e.into()),
            }
        }
        Command::Profile(a) => {
            let p = load_palette(&a.palette)?;
            let g = formats::parse_tiling(&fs::read_to_string(&a.tiling)?, &p)?;
            let profile = match a.oracle.as_str() {
                "compress" => tiler::complexity_profile(&g, p.tile_count(), wangkit_core::compress::byte_pair_len_bits),
                "vm" => {
                    let idx = kolmo::build_index(a.program_cap, a.budget).map_err(|e| anyhow!("{}", e))?;
                    tiler::complexity_profile(&g, p.tile_count(), move |bytes| {
                        let bits: wangkit_core::BitString =
                            bytes.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1)).collect();
                        match idx.k_bound(&bits) {
                            kolmo::Bound::Finite(k) => k as u64,
                            kolmo::Bound::Unbounded => (bits.len() + 16) as u64,
                        }
                    })
                }
                other => bail!("unknown oracle {:?} (use vm or compress)", other),
            };
            let (slope, intercept) = tiler::affine_upper_fit(&profile);
            println!("m max min");
            for (m, (max, min)) in &profile.per_side {
                println!("{} {} {}", m, max, min);
            }
            println!("fit max(m) <= {:.3}*m + {:.3}", slope, intercept);
            let worst = tiler::fit_residuals(&profile, slope, intercept)
                .into_iter()
                .fold(f64::INFINITY, |acc, (_, r)| acc.min(r));
            println!("min residual {:.3}", worst);
            Ok(Ok(()))
        }
        Command::Count(a) => {
            let p = load_palette(&a.palette)?;
            let g = formats::parse_tiling(&fs::read_to_string(&a.tiling)?, &p)?;
            if a.n == 0 || a.n > g.width.min(g.height) {
                bail!("n must be between 1 and min(width, height)");
            }
            let c = tiler::count_distinct_squares(&g, a.n, p.tile_count());
            println!("{}", c.count);
            Ok(Ok(()))
        }
        Command::CompileTm(a) => {
            let tm = formats::parse_tm(&fs::read_to_string(&a.tm)?)?;
            let opts = CompileOptions { tile_budget: a.tile_budget };
            let compiled = if a.double_tape {
                tm::compile_double_tape(&tm, &opts)
            } else {
                tm::compile_origin_constrained(&tm, &opts)
            }
            .map_err(|e| anyhow!("{}", e))?;
            fs::write(&a.out, formats::serialize_palette(&compiled.palette))?;
            println!(
                "compiled {} tiles, origin tile {} ({})",
                compiled.palette.tile_count(),
                compiled.origin_tile,
                compiled.palette.tile_name(compiled.origin_tile)
            );
            Ok(Ok(()))
        }
        Command::Seq(a) => {
            let (num, den) = parse_fraction(&a.c)?;
            let params = KolmoParams::new(num, den, a.m, 8);
            let idx = kolmo::build_index(a.program_cap, a.vm_budget).map_err(|e| anyhow!("{}", e))?;
            let seq = kolmo::build_block_sequence(&params, a.len, &idx).map_err(|e| anyhow!("{}", e))?;
            println!("{}", seq);
            Ok(Ok(()))
        }
        Command::Forbidden(a) => {
            let (num, den) = parse_fraction(&a.c)?;
            let params = KolmoParams::new(num, den, 8, 0);
            let idx = kolmo::build_index(a.program_cap, a.vm_budget).map_err(|e| anyhow!("{}", e))?;
            for (x, k) in kolmo::ForbiddenStream::new(&idx, params).take(a.take) {
                println!("{} {}", x, k);
            }
            Ok(Ok(()))
        }
        Command::Selfsim(a) => {
            let ch = parse_choices(&a.choices, a.rank)?;
            let corner = match a.corner.as_str() {
                "ne" => CornerOrientation::Ne,
                "nw" => CornerOrientation::Nw,
                "se" => CornerOrientation::Se,
                "sw" => CornerOrientation::Sw,
                c => bail!("unknown corner {:?}", c),
            };
            let style = DegenerateStyle { single_dark: a.separator_dark, corner };
            let win = selfsim::generate_pattern(&ch, a.x0, a.y0, a.width, a.height, &style)
                .map_err(|e| anyhow!("{}", e))?;
            println!("separators: {:?}", selfsim::detect_separating_lines(&win));
            if a.verify {
                let catalog = selfsim::CrossCatalog::standard();
                let violations = selfsim::verify_pattern_local(&win, &catalog);
                println!("violations: {}", violations.len());
                if !violations.is_empty() {
                    return Ok(Err(DomainFailure(format!("{} pattern violations", violations.len()))));
                }
            }
            if let Some(path) = a.svg {
                let spec = RenderSpec { target: Target::Svg, ..RenderSpec::default() };
                fs::write(&path, render::render_pattern(&win, &spec)?)?;
                println!("wrote {}", path.display());
            }
            Ok(Ok(()))
        }
        Command::Channels(a) => {
            if a.k < 2 {
                bail!("channel counting starts at rank 2");
            }
            if a.enumerate {
                let sg = channels::enumerate_subgrid(a.k, 0, a.k + 2);
                println!("zone [{}, {})", sg.zone.lo, sg.zone.hi);
                println!("borders {} {} center {}", sg.left_border, sg.right_border, sg.center);
                let chs: Vec<String> = sg.channels.iter().map(|c| c.to_string()).collect();
                println!("channels ({}): {}", chs.len(), chs.join(" "));
                println!("tapes: coordinates = {} mod {}", sg.tape_class.1, sg.tape_class.0);
            }
            if a.count || !a.enumerate {
                println!("{}", channels::count_channels(a.k));
            }
            Ok(Ok(()))
        }
        Command::Stripe(a) => {
            if let Some(decide) = &a.decide {
                let path = a.palette.as_ref().ok_or_else(|| anyhow!("--decide needs --palette"))?;
                let p = load_palette(path)?;
                let left_name = a.left.as_deref().unwrap_or("L");
                let right_name = a.right.as_deref().unwrap_or("R");
                let left = p.color_id(left_name).ok_or_else(|| anyhow!("no color {:?}", left_name))?;
                let right = p.color_id(right_name).ok_or_else(|| anyhow!("no color {:?}", right_name))?;
                let sp = StripePalette { palette: p, left, right };
                let bits = parse_bit_string(decide)?;
                let cfg = StripeConfig { width_cap: a.width_cap, ..StripeConfig::default() };
                let (accepted, stats) = stripes::stripe_decide(&sp, &bits, &cfg).map_err(|e| anyhow!("{}", e))?;
                println!(
                    "{} (cuts {}, depth {}/{})",
                    if accepted { "accepted" } else { "rejected" },
                    stats.cut_count,
                    stats.max_depth,
                    stats.depth_limit
                );
                return Ok(if accepted { Ok(()) } else { Err(DomainFailure(String::from("rejected"))) });
            }
            let ca = a.ca.as_deref().ok_or_else(|| anyhow!("need --decide or --ca"))?;
            let rows = match ca {
                "identity" => {
                    let init = parse_state_row(a.init.as_deref(), a.width)?;
                    stripes::ca_stripe_simulate(&stripes::IdentityRule { states: 16 }, a.steps, &init)
                }
                "shift-left" => {
                    let init = parse_state_row(a.init.as_deref(), a.width)?;
                    stripes::ca_stripe_simulate(&stripes::PileShiftLeft, a.steps, &init)
                }
                "selfstab" => {
                    let rule = stripes::SelfStab::new(a.base);
                    let input = match &a.init {
                        Some(s) => parse_bit_string(s)?,
                        None => vec![1, 0, 1, 1, 0, 0][..a.width.min(6)].to_vec(),
                    };
                    let init = rule.fresh_row(&input);
                    stripes::ca_stripe_simulate(&rule, a.steps, &init)
                }
                other => bail!("unknown automaton {:?}", other),
            };
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("{}", cells.join(" "));
            }
            Ok(Ok(()))
        }
        Command::Hier(a) => {
            let input = formats::parse_bits(&fs::read_to_string(&a.input)?)?;
            let ch = parse_choices(&a.choices, a.rank)?;
            let forest = hierarchy::build_forest(&ch, a.rank, &input).map_err(|e| anyhow!("{}", e))?;
            let (num, den) = parse_fraction(&a.c)?;
            let params = KolmoParams::new(num, den, 8, 0);
            let idx = kolmo::build_index(a.program_cap, a.vm_budget).map_err(|e| anyhow!("{}", e))?;
            let poly_reboot = match &a.poly_reboot {
                None => None,
                Some(s) => {
                    let (c, e) = s.split_once(',').ok_or_else(|| anyhow!("expected COEFF,EXP"))?;
                    Some(PolyReboot { coeff: c.parse()?, exponent: e.parse()? })
                }
            };
            let cfg = SimConfig { params, max_ticks: a.ticks, poly_reboot };
            let outcome = match &a.log {
                Some(path) => {
                    let file = std::io::BufWriter::new(fs::File::create(path)?);
                    let mut sink = wangkit::JsonlSink::new(file);
                    hierarchy::run(&forest, cfg, &idx, &mut sink)
                }
                None => hierarchy::run(&forest, cfg, &idx, &mut NullSink),
            };
            match &outcome.verdict {
                Verdict::Consistent => {
                    println!("Consistent after {} ticks", outcome.ticks);
                    Ok(Ok(()))
                }
                Verdict::Impossible { rank, tick, string, position } => {
                    println!(
                        "Impossible: rank {} at tick {}, string {} at position {}",
                        rank, tick, string, position
                    );
                    Ok(Err(DomainFailure(String::from("impossible"))))
                }
            }
        }
        Command::Render(a) => {
            let p = load_palette(&a.palette)?;
            let g = formats::parse_tiling(&fs::read_to_string(&a.tiling)?, &p)?;
            let target = match a.out.extension().and_then(|e| e.to_str()) {
                Some("svg") => Target::Svg,
                Some("ppm") => Target::Ppm,
                other => bail!("unsupported render target {:?} (use .svg or .ppm)", other),
            };
            let mut layers = Layers { tiles: false, edges: false, ranks: false, channels: false, zones: false };
            for l in a.layers.split(',') {
                match l.trim() {
                    "tiles" => layers.tiles = true,
                    "edges" => layers.edges = true,
                    "ranks" => layers.ranks = true,
                    "channels" => layers.channels = true,
                    "zones" => layers.zones = true,
                    "" => {}
                    other => bail!("unknown layer {:?}", other),
                }
            }
            let spec = RenderSpec { target, cell_px: a.cell_px, layers };
            fs::write(&a.out, render::render_grid(&p, &g, &spec)?)?;
            println!("wrote {}", a.out.display());
            Ok(Ok(()))
        }
    }
}

fn parse_state_row(init: Option<&str>, width: usize) -> Result<Vec<u32>> {
    match init {
        None => Ok(vec![0; width]),
        Some(s) => {
            if s.contains(' ') {
                s.split_whitespace().map(|v| Ok(v.parse()?)).collect()
            } else {
                s.chars()
                    .map(|c| c.to_digit(10).map(|d| d as u32).ok_or_else(|| anyhow!("bad state digit {:?}", c)))
                    .collect()
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(DomainFailure(msg))) => {
            eprintln!("{}", msg);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
