use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heatcost::climate::ForcingParams;
use heatcost::damages::{fit_exponential, residual_sigma_curve, scale_heat_curve, DamagesTarget};
use heatcost::discount::{load_crisis_events, wtp_stats, DiscountSpec};
use heatcost::emissions::{write_trajectories_csv, Gas};
use heatcost::ingest::{cpi_adjust, load_damages, load_macro, load_yields, write_series, yield_stats, Series};
use heatcost::model::{simulate, simulate_all};
use heatcost::risk::write_risk_csv;
use heatcost::runner::{risk_span_table, run, table_report, wtp_table, FitTarget, ReportFormat, RunConfig, TABLE_SPANS};
use heatcost::scenario::Catalog;
use heatcost::surface::{export_surface, log_spans, sc_ghg_surface, SurfaceAnnotations, SurfaceContext, SurfaceOptions};
use heatcost::{Error, Result};

#[derive(Parser)]
#[command(name = "heatcost", version, about = "Ocean-heat social cost of greenhouse gases")]
struct Cli {
    /// Output directory
    #[arg(long, global = true, env = "HEATCOST_OUTPUT_DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a data file and write it back normalised
    Ingest {
        /// damages, yields or macro
        #[arg(long, default_value = "damages")]
        kind: String,
        file: PathBuf,
        /// CPI series for price adjustment of damages
        #[arg(long)]
        cpi: Option<PathBuf>,
        /// Dollar year of the damages (target year when --cpi is given)
        #[arg(long, default_value_t = 2021)]
        base_year: i32,
        #[arg(long, default_value_t = 30)]
        tenor: u32,
    },
    /// Simulate scenario presets and write climate and trajectory CSVs
    Simulate {
        #[arg(long = "preset")]
        presets: Vec<String>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Fit damages and scale a scenario's ocean heat onto them
    Fit {
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Risk curves for the fitted damages, or the span table with --table
    Risk {
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        risk_levels: Vec<f64>,
        /// Curve years, start:end
        #[arg(long, default_value = "1980:2100", value_parser = parse_range)]
        years: (i32, i32),
        /// Print the risk-over-span table instead of curves
        #[arg(long)]
        table: bool,
        #[arg(long, value_delimiter = ',')]
        span: Vec<u32>,
    },
    /// Social-cost surface for one gas
    Surface {
        #[arg(long, default_value = "co2")]
        gas: Gas,
        #[arg(long, default_value_t = 2025)]
        year: i32,
        /// discount points x span points
        #[arg(long, default_value = "41x30", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Centre discount rate
        #[arg(long, default_value_t = 0.0157)]
        discount: f64,
        #[arg(long, default_value_t = 0.01885)]
        sigma: f64,
        #[arg(long, default_value_t = 2)]
        band_sigmas: u32,
        /// Longest span in years
        #[arg(long, default_value_t = 1500)]
        span: u32,
        #[arg(long, default_value = "baseline-low")]
        low: String,
        #[arg(long, default_value = "s-aerosol-high-permafrost")]
        high: String,
        /// Dollars per joule of OHC; otherwise fitted from --damages
        #[arg(long)]
        dollars_per_joule: Option<f64>,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Crisis-spending statistics
    Wtp {
        #[arg(long, default_value = "data/crisis_events.csv")]
        events: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
    /// Run every stage from a JSON config
    RunAll {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// ForcingParams JSON
    #[arg(long)]
    forcing: Option<PathBuf>,
    /// Scenario catalog JSON
    #[arg(long)]
    catalog: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<(Catalog, ForcingParams)> {
        let catalog = match &self.catalog {
            Some(p) => Catalog::load(p)?,
            None => Catalog::shipped(),
        };
        let params = match &self.forcing {
            Some(p) => ForcingParams::load(p)?,
            None => ForcingParams::default(),
        };
        Ok((catalog, params))
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    damages: Option<PathBuf>,
    #[arg(long, default_value_t = 2021)]
    base_year: i32,
    #[arg(long, default_value = "baseline-low")]
    preset: String,
    #[arg(long, default_value = "1980:2021", value_parser = parse_range)]
    window: (i32, i32),
    #[arg(long, default_value = "fitted", value_parser = parse_target)]
    target: FitTarget,
    #[command(flatten)]
    model: ModelArgs,
}

fn parse_range(s: &str) -> std::result::Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or("expected start:end")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or("expected NxM")?;
    Ok((a.parse().map_err(|e| format!("{e}"))?, b.parse().map_err(|e| format!("{e}"))?))
}

fn parse_target(s: &str) -> std::result::Result<FitTarget, String> {
    match s {
        "fitted" => Ok(FitTarget::Fitted),
        "observed" => Ok(FitTarget::Observed),
        other => Err(format!("unknown target '{other}'")),
    }
}

fn out_dir(cli: &Option<PathBuf>) -> PathBuf {
    cli.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(p) = path.parent() {
        std::fs::create_dir_all(p).map_err(|e| Error::Io { path: p.into(), source: e })?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::Io { path: path.into(), source: e })
}

struct Fitted {
    scaled: heatcost::damages::ScaledDamagesCurve,
    wde: heatcost::damages::ExpFit,
    sigma: heatcost::damages::ExpCurve,
}

fn do_fit(args: &FitArgs) -> Result<Fitted> {
    let path = args
        .damages
        .as_ref()
        .ok_or_else(|| Error::Config("--damages is required".into()))?;
    let damages = load_damages(path, args.base_year)?;
    let (catalog, params) = args.model.load()?;
    let run = simulate(&catalog.preset(&args.preset)?, &params, &[])?;
    let points = damages.window(args.window.0, args.window.1);
    let wde = fit_exponential(&points, args.window.0)?;
    let target = match args.target {
        FitTarget::Fitted => DamagesTarget::Fitted(&wde.curve),
        FitTarget::Observed => DamagesTarget::Observed(&damages),
    };
    let scaled = scale_heat_curve(&run.climate, target, args.window)?;
    let windowed = heatcost::ingest::DamagesSeries::new(points, damages.base_year)?;
    let sigma = residual_sigma_curve(&windowed, &wde.curve)?;
    Ok(Fitted { scaled, wde, sigma })
}

fn execute(cli: Cli) -> Result<()> {
    let out = out_dir(&cli.out);
    match cli.command {
        Command::Ingest {
            kind,
            file,
            cpi,
            base_year,
            tenor,
        } => {
            let series = match kind.as_str() {
                "damages" => match cpi {
                    Some(c) => Series::Damages(cpi_adjust(&load_damages(&file, base_year)?, &load_macro(c)?, base_year)?),
                    None => Series::Damages(load_damages(&file, base_year)?),
                },
                "yields" => {
                    let y = load_yields(&file, tenor)?;
                    let (mean, sd) = yield_stats(&y)?;
                    eprintln!("mean {mean:.6}  sigma {sd:.6}");
                    Series::Yields(y)
                }
                "macro" => Series::Macro(load_macro(&file)?),
                other => return Err(Error::Config(format!("unknown kind '{other}'"))),
            };
            let mut buf = Vec::new();
            write_series(&mut buf, &series)?;
            let name = file.file_name().map(|f| f.to_os_string()).unwrap_or_else(|| "series.csv".into());
            let dest = out.join("ingest").join(name);
            write_file(&dest, &buf)?;
            println!("{}", dest.display());
        }
        Command::Simulate { presets, model } => {
            let (catalog, params) = model.load()?;
            let scenarios = if presets.is_empty() {
                catalog.scenarios(None)?
            } else {
                presets.iter().map(|p| catalog.preset(p)).collect::<Result<Vec<_>>>()?
            };
            let runs = simulate_all(&scenarios, &params)?;
            for (s, r) in scenarios.iter().zip(&runs) {
                let mut buf = Vec::new();
                r.climate.write_csv(&mut buf)?;
                write_file(&out.join("climate").join(format!("{}.csv", s.name)), &buf)?;
                let mut buf = Vec::new();
                write_trajectories_csv(&mut buf, &r.trajectories)?;
                write_file(&out.join("trajectories").join(format!("{}.csv", s.name)), &buf)?;
                let last = r.climate.states.last().expect("non-empty run");
                println!("{:<36} {}  dT {:>8.3} C  OHC {:.4e} J", s.name, last.year, last.delta_t, last.ohc);
            }
        }
        Command::Fit { fit } => {
            let f = do_fit(&fit)?;
            let summary = serde_json::json!({
                "preset": fit.preset,
                "window": fit.window,
                "wde": f.wde.curve,
                "wde_r_squared": f.wde.r_squared,
                "e_sigma": f.sigma,
                "dollars_per_joule": f.scaled.scalar,
                "r_squared": f.scaled.r_squared,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Risk {
            fit,
            risk_levels,
            years,
            table,
            span,
        } => {
            if table {
                let spans = if span.is_empty() { TABLE_SPANS.to_vec() } else { span };
                print!("{}", table_report(&risk_span_table(&risk_levels, &spans)?, ReportFormat::Markdown)?);
                return Ok(());
            }
            let f = do_fit(&fit)?;
            let mut buf = Vec::new();
            write_risk_csv(&mut buf, &f.scaled, &f.wde.curve, &f.sigma, &risk_levels, years)?;
            let dest = out.join("risk_curves.csv");
            write_file(&dest, &buf)?;
            println!("{}", dest.display());
        }
        Command::Surface {
            gas,
            year,
            grid,
            discount,
            sigma,
            band_sigmas,
            span,
            low,
            high,
            dollars_per_joule,
            fit,
        } => {
            let scalar = match dollars_per_joule {
                Some(s) => s,
                None => do_fit(&fit)?.scaled.scalar,
            };
            let (catalog, params) = fit.model.load()?;
            let ctx = SurfaceContext {
                params,
                dollars_per_joule: scalar,
                spec: DiscountSpec {
                    base_rate: discount,
                    sigma,
                    band: band_sigmas,
                },
                options: SurfaceOptions {
                    discount_points: grid.0,
                    spans: log_spans(grid.1, 10.min(span), span),
                    ..SurfaceOptions::default()
                },
            };
            let g = sc_ghg_surface(gas, &catalog.preset(&low)?, &catalog.preset(&high)?, year, &ctx)?;
            let dest = out.join(format!("sc_{}_{year}.csv", gas.code().to_ascii_lowercase()));
            if let Some(p) = dest.parent() {
                std::fs::create_dir_all(p).map_err(|e| Error::Io { path: p.into(), source: e })?;
            }
            for p in export_surface(&g, &SurfaceAnnotations::default(), &dest)? {
                println!("{}", p.display());
            }
        }
        Command::Wtp { events, format } => {
            let ev = load_crisis_events(&events)?;
            let stats = wtp_stats(&ev)?;
            print!("{}", table_report(&wtp_table(&ev, &stats), format)?);
        }
        Command::RunAll { config } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(o) = cli.out {
                cfg.output_dir = o;
            }
            let manifest = run(&cfg)?;
            println!("{} artifacts in {}", manifest.artifacts.len(), cfg.output_dir.display());
            for n in &manifest.notes {
                println!("note: {n}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
