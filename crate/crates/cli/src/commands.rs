use std::io::Write as _;
use std::path::Path;

use boxbf_client::Client;
use boxbf_core::api::{ApproxReportRequest, BenchRequest, KernelDescription};
use boxbf_core::bench::BenchConfig;
use boxbf_core::filter::SpatialChoice;
use boxbf_core::quality::MetricReport;
use boxbf_core::{load_pgm, Image};
use boxbf_service::ServerHandle;

use crate::{ApproxCmd, BenchCmd, Cli, Command, Failure, FamilyArg, FilterCmd, PrecomputeCmd, ServeCmd};

type Outcome = Result<(), Failure>;

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if !path.exists() {
        return Err(Failure::usage(format!("input file not found: {}", path.display())));
    }
    std::fs::read(path).map_err(|e| Failure::runtime(format!("cannot read {}: {e}", path.display())))
}

fn read_image(path: &Path) -> Result<Image, Failure> {
    let bytes = read_input(path)?;
    load_pgm(&bytes).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => write_output(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::runtime(format!("cannot write to stdout: {e}")))
        }
    }
}

fn metrics_line(m: &MetricReport) -> String {
    match m.ssim {
        Some(s) => format!("vs oracle: psnr={:.4} dB ssim={s:.6}", m.psnr),
        None => format!(
            "vs oracle: psnr={:.4} dB ssim=n/a (image smaller than the 11x11 window)",
            m.psnr
        ),
    }
}

/// Connection to the service, owning the in-process server if one was started.
struct Session {
    client: Client,
    local: Option<ServerHandle>,
}

impl Session {
    async fn open(server: Option<&str>) -> Result<Self, Failure> {
        match server {
            Some(url) => Ok(Self {
                client: Client::new(url),
                local: None,
            }),
            None => {
                let handle = boxbf_service::spawn_local()
                    .await
                    .map_err(|e| Failure::runtime(format!("cannot start local service: {e}")))?;
                Ok(Self {
                    client: Client::new(handle.base_url()),
                    local: Some(handle),
                })
            }
        }
    }

    async fn close(self) {
        if let Some(h) = self.local {
            let _ = h.shutdown().await;
        }
    }
}

pub async fn run(cli: Cli) -> Outcome {
    if let Command::Serve(cmd) = &cli.command {
        return serve(cmd).await;
    }
    let session = Session::open(cli.server.as_deref()).await?;
    let result = match &cli.command {
        Command::Filter(cmd) => filter(&session.client, cmd).await,
        Command::Bench(cmd) => bench(&session.client, cmd).await,
        Command::ApproxReport(cmd) => approx_report(&session.client, cmd).await,
        Command::Precompute(cmd) => precompute(&session.client, cmd).await,
        Command::Serve(_) => unreachable!("handled above"),
    };
    session.close().await;
    result
}

async fn serve(cmd: &ServeCmd) -> Outcome {
    let handle = boxbf_service::spawn(cmd.addr.as_str())
        .await
        .map_err(|e| Failure::runtime(format!("cannot bind {}: {e}", cmd.addr)))?;
    println!("listening on {}", handle.base_url());
    let _ = std::io::stdout().flush();
    tokio::signal::ctrl_c()
        .await
        .map_err(|e| Failure::runtime(format!("signal handling failed: {e}")))?;
    handle.shutdown().await.map_err(|e| Failure::runtime(e.to_string()))
}

async fn filter(client: &Client, cmd: &FilterCmd) -> Outcome {
    let image = read_image(&cmd.input)?;
    let out = client
        .filter(&image, cmd.method.into(), cmd.kernel.to_args(), cmd.compare_oracle)
        .await?;
    write_output(&cmd.output, &out.pgm_bytes()?)?;
    let r = &out.response;
    println!(
        "{}x{} filtered in {:.3} ms (T_r = {:.4}) -> {}",
        r.width,
        r.height,
        r.wall_ms,
        r.t_r,
        cmd.output.display()
    );
    if let Some(m) = &r.metrics {
        println!("{}", metrics_line(m));
    }
    Ok(())
}

async fn bench(client: &Client, cmd: &BenchCmd) -> Outcome {
    let image = match &cmd.input {
        Some(p) => Some(boxbf_client::encode_image(&read_image(p)?)),
        None => None,
    };
    let spatial = match cmd.plan.spatial_mode() {
        boxbf_core::api::SpatialMode::Fused => SpatialChoice::Fused {
            level: cmd.plan.spatial_terms,
        },
        boxbf_core::api::SpatialMode::BestN => SpatialChoice::BestN {
            n: cmd.plan.spatial_terms,
            m: cmd.plan.spatial_terms * cmd.plan.m_factor,
            j_max: boxbf_core::approx::haar::DEFAULT_J_MAX,
        },
    };
    let req = BenchRequest {
        image,
        width: Some(cmd.width),
        height: cmd.height,
        seed: cmd.seed,
        config: BenchConfig {
            radii: cmd.radii.clone(),
            sigma_r: cmd.sigma_r.clone(),
            methods: cmd.methods.clone(),
            epsilon: cmd.plan.epsilon,
            spatial,
            range_terms: cmd.plan.range_terms,
            m_factor: cmd.plan.m_factor,
            warmup: cmd.warmup,
            runs: cmd.runs,
        },
    };
    let resp = client.bench(&req).await?;
    emit(cmd.output.as_deref(), &resp.csv)
}

fn read_table(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = String::from_utf8(read_input(path)?)
        .map_err(|_| Failure::runtime(format!("{} is not UTF-8 text", path.display())))?;
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Failure::runtime(format!("{}: cannot parse {t:?} as a number", path.display())))
        })
        .collect()
}

async fn approx_report(client: &Client, cmd: &ApproxCmd) -> Outcome {
    // clap enforces the per-family flag, so the fallbacks are unreachable
    let kernel = match cmd.kernel {
        FamilyArg::Gaussian => KernelDescription::Gaussian {
            sigma: cmd.sigma.unwrap_or_default(),
        },
        FamilyArg::Box => KernelDescription::Box {
            half_width: cmd.half_width.unwrap_or_default(),
        },
        FamilyArg::Tabulated => KernelDescription::Tabulated {
            step: cmd.step,
            values: read_table(cmd.table.as_deref().expect("required by clap"))?,
        },
    };
    let req = ApproxReportRequest {
        role: cmd.role.into(),
        kernel,
        epsilon: cmd.epsilon,
        terms: cmd.terms,
        m_factor: cmd.m_factor,
        j_max: cmd.j_max,
    };
    let resp = client.approx_report(&req).await?;
    emit(cmd.output.as_deref(), &resp.csv)?;
    if cmd.output.is_some() {
        println!("{}", resp.summary);
    } else {
        eprintln!("{}", resp.summary);
    }
    Ok(())
}

async fn precompute(client: &Client, cmd: &PrecomputeCmd) -> Outcome {
    let image = read_image(&cmd.input)?;
    let info = client
        .create_session(&image, cmd.radii.clone(), cmd.max_frequency)
        .await?;
    let result = client
        .session_filter(&info.id, cmd.kernel.to_args(), cmd.compare_oracle)
        .await;
    // the session is only needed for this one filtering pass
    let _ = client.delete_session(&info.id).await;
    let out = result?;
    write_output(&cmd.output, &out.pgm_bytes()?)?;
    let r = &out.response;
    println!(
        "precomputed {} radii in {:.3} ms; filtered with cached T_r = {} in {:.3} ms -> {}",
        info.radii.len(),
        info.build_ms,
        r.t_r,
        r.wall_ms,
        cmd.output.display()
    );
    if let Some(m) = &r.metrics {
        println!("{}", metrics_line(m));
    }
    Ok(())
}
