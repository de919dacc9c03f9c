use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use curveflow::energies::{energy, integrand, EnergyConfig, EnergyKind, WmcScheme};
use curveflow::flow::{mc_flow_observed, FlowConfig, FlowScheme};
use curveflow::kernels::{anisotropy_score, exact_weights, kernel, spectral_magnitude, KernelName};
use curveflow::metrics::{ssim_channels, SsimConfig};
use curveflow::operators::{
    area_gradient_fd, gradient_magnitude, mean_curvature_fd, wmc_fd, wmc_half_laplace, DiffConfig,
};
use curveflow::solvers::{solve, SmoothModel, SolverConfig};
use curveflow::{bench, io, parallel, stats, Image2D, Result};

#[derive(Parser)]
#[command(
    name = "curveflow",
    version,
    about = "Weighted mean curvature filters and tools"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the stencils, or write the spectrum of one of them.
    Kernels {
        /// Print every kernel as CSV with exact rational weights.
        #[arg(long)]
        dump: bool,
        /// Kernel whose spectral magnitude is written to --out.
        #[arg(long, value_name = "NAME")]
        spectrum: Option<KernelName>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a differential operator and save `clamp(value * scale + offset)`.
    Op {
        #[arg(long)]
        kind: OpKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
    },
    /// Evaluate a regularization energy.
    Energy {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "area")]
        reg: EnergyKind,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Use finite differences instead of half-Laplace stencils for WMC.
        #[arg(long)]
        wmc_fd: bool,
        /// Save the per-pixel integrand (clamped to 0..255).
        #[arg(long)]
        integrand: Option<PathBuf>,
    },
    /// Run mean curvature flow.
    Flow {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "half")]
        scheme: FlowScheme,
        /// Time step; defaults to 0.2 for fd and 1 for half.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also save every N-th iterate as `<out stem>_<iter>.png`.
        #[arg(long, value_name = "N")]
        snapshot_every: Option<usize>,
    },
    /// Smooth an image with an l1/l2 area model or the eps-TV baseline.
    Smooth {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "l2")]
        model: SmoothModel,
        #[arg(long, default_value_t = 5.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.15)]
        dt: f64,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Smoothing constant of the eps-TV baseline.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
        /// Per-iteration CSV: iter, fidelity, regularization, total.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Gradient and WMC histograms of an image directory.
    Stats {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "stats_")]
        out_prefix: String,
        #[arg(long, default_value_t = stats::MAX_SCATTER_SAMPLES)]
        max_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the SSIM of two images.
    Ssim { a: PathBuf, b: PathBuf },
    /// Time the half-Laplace operator.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [512, 1024, 2048])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpKind {
    Grad,
    Mc,
    WmcFd,
    Wmc,
    AreaGrad,
}

fn apply_op(kind: OpKind, img: &Image2D) -> Image2D {
    let diff = DiffConfig::default();
    match kind {
        OpKind::Grad => gradient_magnitude(img),
        OpKind::Mc => mean_curvature_fd(img, &diff),
        OpKind::WmcFd => wmc_fd(img, &diff),
        OpKind::Wmc => wmc_half_laplace(img),
        OpKind::AreaGrad => area_gradient_fd(img),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn kernels_cmd(
    dump: bool,
    spectrum: Option<KernelName>,
    grid: usize,
    out: Option<PathBuf>,
) -> Result<()> {
    if let Some(name) = spectrum {
        let mag = spectral_magnitude(&kernel(name), grid)?;
        let mut w: Box<dyn Write> = match &out {
            Some(p) => Box::new(create(p)?),
            None => Box::new(std::io::stdout().lock()),
        };
        let mut csv = csv::Writer::from_writer(&mut w);
        csv.write_record(["kx", "ky", "magnitude"])?;
        for ky in 0..grid {
            for kx in 0..grid {
                csv.write_record([kx.to_string(), ky.to_string(), mag.get(kx, ky).to_string()])?;
            }
        }
        csv.flush()?;
        return Ok(());
    }
    let mut stdout = std::io::stdout().lock();
    if dump {
        let mut csv = csv::Writer::from_writer(&mut stdout);
        let mut header = vec!["kernel".to_string()];
        header.extend((0..3).flat_map(|r| (0..3).map(move |c| format!("w{r}{c}"))));
        csv.write_record(&header)?;
        for name in KernelName::ALL {
            let mut rec = vec![name.to_string()];
            rec.extend(exact_weights(name).iter().flatten().map(|w| w.to_string()));
            csv.write_record(&rec)?;
        }
        csv.flush()?;
        return Ok(());
    }
    for name in KernelName::ALL {
        let w = exact_weights(name);
        writeln!(stdout, "{name}:")?;
        for row in w {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>6}")).collect();
            writeln!(stdout, "  {}", cells.join(" "))?;
        }
    }
    writeln!(stdout, "anisotropy:")?;
    for name in KernelName::LAPLACE {
        writeln!(stdout, "  {name} {:.4}", anisotropy_score(&kernel(name)))?;
    }
    Ok(())
}

fn flow_cmd(input: &Path, cfg: FlowConfig, out: &Path, every: Option<usize>) -> Result<()> {
    let channels = io::load_channels(input)?;
    let every = every.filter(|&n| n > 0);
    let stem = out.with_extension("");
    let mut results = Vec::with_capacity(channels.len());
    let mut snaps: Vec<Vec<Image2D>> = Vec::new();
    for c in &channels {
        let mut own = Vec::new();
        results.push(mc_flow_observed(c, &cfg, |t, u| {
            if every.is_some_and(|n| t % n == 0) {
                own.push(u.clone());
            }
        })?);
        snaps.push(own);
    }
    if let Some(n) = every {
        for k in 0..snaps[0].len() {
            let frame: Vec<Image2D> = snaps.iter().map(|s| s[k].clone()).collect();
            let name = format!("{}_{:04}.png", stem.display(), (k + 1) * n);
            io::save_channels(name, &frame)?;
        }
    }
    io::save_channels(out, &results)
}

fn smooth_cmd(input: &Path, cfg: SolverConfig, out: &Path, report: Option<PathBuf>) -> Result<()> {
    let channels = io::load_channels(input)?;
    let reports = channels
        .iter()
        .map(|c| solve(c, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let images: Vec<Image2D> = reports.iter().map(|r| r.image.clone()).collect();
    io::save_channels(out, &images)?;
    for (i, r) in reports.iter().enumerate() {
        eprintln!(
            "channel {i}: {} iterations, converged {}, step {}",
            r.iterations, r.converged, r.dt
        );
    }
    if let Some(path) = report {
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["iter", "fidelity", "regularization", "total"])?;
        let n = reports.iter().map(|r| r.iterations).max().unwrap_or(0);
        for it in 0..n {
            // Channels that stopped early contribute their final values.
            let at = |v: &Vec<f64>| v[it.min(v.len() - 1)];
            let fid: f64 = reports.iter().map(|r| at(&r.fidelity)).sum();
            let reg: f64 = reports.iter().map(|r| at(&r.regularization)).sum();
            w.write_record([
                (it + 1).to_string(),
                fid.to_string(),
                reg.to_string(),
                (fid + cfg.lambda * reg).to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn stats_cmd(dir: &Path, prefix: &str, max_samples: usize, seed: u64) -> Result<()> {
    let s = stats::corpus_stats(dir)?;
    stats::write_histogram_csv(create(Path::new(&format!("{prefix}hist.csv")))?, &s)?;
    stats::write_cdf_csv(create(Path::new(&format!("{prefix}cdf.csv")))?, &s)?;
    let mut fit = csv::Writer::from_writer(create(Path::new(&format!("{prefix}fit.csv")))?);
    fit.write_record(["series", "coef", "intercept", "r_squared", "bins"])?;
    for (name, h) in [("wmc", &s.wmc), ("grad", &s.gradient)] {
        let f = stats::fit_sparsity_model(h)?;
        fit.write_record([
            name.to_string(),
            f.coef.to_string(),
            f.intercept.to_string(),
            f.r_squared.to_string(),
            f.bins_used.to_string(),
        ])?;
        println!(
            "{name}: -ln p = {:.4} sqrt|x| + {:.4} (R^2 {:.4})",
            f.coef, f.intercept, f.r_squared
        );
    }
    fit.flush()?;
    let samples = stats::area_grad_scatter(dir, max_samples, seed)?;
    stats::write_scatter_csv(
        create(Path::new(&format!("{prefix}scatter.csv")))?,
        &samples,
    )?;
    println!("images: {}", s.images);
    println!("p(|grad| <= 30) = {:.4}", s.gradient.abs_cdf(30.0));
    println!("p(|H^w| <= 30)  = {:.4}", s.wmc.abs_cdf(30.0));
    Ok(())
}

fn bench_cmd(sizes: &[usize], reps: usize, threads: usize, out: Option<PathBuf>) -> Result<()> {
    let report = bench::bench_wmc(sizes, reps, threads)?;
    println!("threads {threads}, reps {reps}");
    for e in &report.entries {
        println!(
            "{:>6}^2  median {:>10.3} ms  {:>8.1} Mpx/s  checksum {:016x}",
            e.size,
            e.median_seconds * 1e3,
            e.throughput / 1e6,
            e.checksum
        );
    }
    if let Some(p) = out {
        report.write_csv(create(&p)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Kernels {
            dump,
            spectrum,
            grid,
            out,
        } => kernels_cmd(dump, spectrum, grid, out),
        Cmd::Op {
            kind,
            input,
            out,
            scale,
            offset,
        } => {
            let channels = io::load_channels(&input)?;
            let mapped: Vec<Image2D> = channels
                .iter()
                .map(|c| apply_op(kind, c).map(|v| v * scale + offset))
                .collect();
            io::save_channels(&out, &mapped)
        }
        Cmd::Energy {
            input,
            reg,
            q,
            eps,
            wmc_fd,
            integrand: dump,
        } => {
            let scheme = if wmc_fd {
                WmcScheme::FiniteDifference
            } else {
                WmcScheme::HalfLaplace
            };
            let cfg = EnergyConfig::new(reg)
                .with_q(q)
                .with_eps(eps)
                .with_wmc_scheme(scheme);
            let channels = io::load_channels(&input)?;
            let mut total = 0.0;
            for c in &channels {
                total += energy(c, &cfg)?;
            }
            println!("{total}");
            if let Some(path) = dump {
                let maps = channels
                    .iter()
                    .map(|c| integrand(c, &cfg))
                    .collect::<Result<Vec<_>>>()?;
                io::save_channels(path, &maps)?;
            }
            Ok(())
        }
        Cmd::Flow {
            input,
            scheme,
            dt,
            iters,
            out,
            snapshot_every,
        } => {
            let mut cfg = FlowConfig::new(scheme, iters);
            if let Some(dt) = dt {
                cfg = cfg.with_dt(dt);
            }
            flow_cmd(&input, cfg, &out, snapshot_every)
        }
        Cmd::Smooth {
            input,
            model,
            lambda,
            alpha,
            dt,
            iters,
            eps,
            tol,
            out,
            report,
        } => {
            let cfg = SolverConfig::new(model, lambda)
                .with_alpha(alpha)
                .with_dt(dt)
                .with_iters(iters)
                .with_eps(eps)
                .with_tol(tol);
            smooth_cmd(&input, cfg, &out, report)
        }
        Cmd::Stats {
            dir,
            out_prefix,
            max_samples,
            seed,
        } => stats_cmd(&dir, &out_prefix, max_samples, seed),
        Cmd::Ssim { a, b } => {
            let s = ssim_channels(
                &io::load_channels(a)?,
                &io::load_channels(b)?,
                &SsimConfig::default(),
            )?;
            println!("{s:.4}");
            Ok(())
        }
        Cmd::Bench {
            sizes,
            reps,
            threads,
            out,
        } => bench_cmd(
            &sizes,
            reps,
            threads.unwrap_or_else(parallel::available_threads),
            out,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
