use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use boxbf_core::api::{
    ApproxReportRequest, ApproxReportResponse, BenchRequest, BenchResponse, FilterMethod, FilterRequest,
    FilterResponse, KernelArgs, PrecomputeRequest, SessionFilterRequest, SessionInfo,
};
use boxbf_core::approx::report::approx_report;
use boxbf_core::bench::{rows_to_csv, run_bench};
use boxbf_core::filter::{
    brute_force_bf, fast_bf_with, filter_with_cache, precompute_stacks_with, PrecomputeCache, TrigSource,
};
use boxbf_core::quality::MetricReport;
use boxbf_core::synth::synthetic_image;
use boxbf_core::Image;
use uuid::Uuid;

use crate::codec::{decode_image, encode_image};
use crate::error::{ApiError, ApiResult};
use crate::AppState;

/// Side length of the synthetic image used when a bench request has none.
pub const DEFAULT_BENCH_SIZE: usize = 256;

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker task failed: {e}")))?
}

fn gaussian(sigma: f64) -> impl Fn(f64) -> f64 + Sync {
    move |x: f64| (-x * x / (2.0 * sigma * sigma)).exp()
}

fn oracle(image: &Image, kernel: &KernelArgs, rho: usize) -> Image {
    brute_force_bf(image, gaussian(kernel.sigma_s), gaussian(kernel.sigma_r), rho)
}

/// Metrics are taken on the 8-bit images the caller actually receives.
fn compare(output: &Image, reference: &Image) -> ApiResult<MetricReport> {
    Ok(MetricReport::compare(&output.quantized(), &reference.quantized())?)
}

pub async fn health() -> &'static str {
    "ok"
}

pub async fn filter(body: Result<Json<FilterRequest>, JsonRejection>) -> ApiResult<Json<FilterResponse>> {
    let Json(req) = body?;
    blocking(move || {
        let image = decode_image(&req.image)?;
        let params = req.kernel.to_params()?;
        let start = Instant::now();
        let (out, diagnostics) = match req.method {
            FilterMethod::Brute => (oracle(&image, &req.kernel, params.rho), None),
            FilterMethod::Fast | FilterMethod::FastLut => {
                let source = if req.method == FilterMethod::Fast {
                    TrigSource::Direct
                } else {
                    TrigSource::Lut
                };
                let o = fast_bf_with(&image, &params, source)?;
                (o.image, Some(o.diagnostics))
            }
        };
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let metrics = if req.compare_oracle {
            Some(compare(&out, &oracle(&image, &req.kernel, params.rho))?)
        } else {
            None
        };
        Ok(Json(FilterResponse {
            image: encode_image(&out),
            width: out.width(),
            height: out.height(),
            wall_ms,
            diagnostics,
            metrics,
            t_r: params.range_kernel.t,
        }))
    })
    .await
}

pub async fn bench(body: Result<Json<BenchRequest>, JsonRejection>) -> ApiResult<Json<BenchResponse>> {
    let Json(req) = body?;
    blocking(move || {
        let image = match &req.image {
            Some(b64) => decode_image(b64)?,
            None => {
                let w = req.width.unwrap_or(DEFAULT_BENCH_SIZE);
                synthetic_image(w, req.height.unwrap_or(w), req.seed)?
            }
        };
        let rows = run_bench(&image, &req.config)?;
        let csv = rows_to_csv(&rows);
        Ok(Json(BenchResponse { rows, csv }))
    })
    .await
}

pub async fn approx(body: Result<Json<ApproxReportRequest>, JsonRejection>) -> ApiResult<Json<ApproxReportResponse>> {
    let Json(req) = body?;
    blocking(move || {
        let kernel = req.truncated_kernel()?;
        let report = approx_report(&kernel, req.terms, req.m(), req.j_max, req.m_factor)?;
        Ok(Json(ApproxReportResponse {
            csv: report.to_csv(),
            summary: report.summary_line(),
            report,
        }))
    })
    .await
}

fn session_info(id: Uuid, cache: &PrecomputeCache) -> SessionInfo {
    SessionInfo {
        id: id.to_string(),
        width: cache.image().width(),
        height: cache.image().height(),
        radii: cache.radii(),
        max_frequency: cache.max_frequency(),
        build_ms: cache.build_ms,
    }
}

fn parse_id(id: &str) -> ApiResult<Uuid> {
    Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("no session {id}")))
}

fn lookup(state: &AppState, id: &str) -> ApiResult<(Uuid, Arc<PrecomputeCache>)> {
    let uuid = parse_id(id)?;
    let cache = state
        .sessions
        .lock()
        .get(&uuid)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no session {id}")))?;
    Ok((uuid, cache))
}

pub async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<PrecomputeRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionInfo>)> {
    let Json(req) = body?;
    let cache = blocking(move || {
        let image = decode_image(&req.image)?;
        Ok(precompute_stacks_with(&image, &req.radii, req.max_frequency)?)
    })
    .await?;
    let id = Uuid::new_v4();
    let info = session_info(id, &cache);
    state.sessions.lock().insert(id, Arc::new(cache));
    tracing::info!(%id, radii = ?info.radii, "session created");
    Ok((StatusCode::CREATED, Json(info)))
}

pub async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionInfo>> {
    let (uuid, cache) = lookup(&state, &id)?;
    Ok(Json(session_info(uuid, &cache)))
}

pub async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let uuid = parse_id(&id)?;
    match state.sessions.lock().remove(&uuid) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::not_found(format!("no session {id}"))),
    }
}

pub async fn session_filter(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<SessionFilterRequest>, JsonRejection>,
) -> ApiResult<Json<FilterResponse>> {
    let Json(req) = body?;
    let (_, cache) = lookup(&state, &id)?;
    blocking(move || {
        let params = req.kernel.to_params()?;
        let t_r = cache.select_radius(params.range_kernel.t)?;
        let image = cache.image();
        let start = Instant::now();
        let out = filter_with_cache(image, &cache, &params)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let metrics = if req.compare_oracle {
            Some(compare(&out.image, &oracle(image, &req.kernel, params.rho))?)
        } else {
            None
        };
        Ok(Json(FilterResponse {
            image: encode_image(&out.image),
            width: out.image.width(),
            height: out.image.height(),
            wall_ms,
            diagnostics: Some(out.diagnostics),
            metrics,
            t_r,
        }))
    })
    .await
}
