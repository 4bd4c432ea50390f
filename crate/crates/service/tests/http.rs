use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use boxbf_core::api::{ApproxReportResponse, BenchResponse, ErrorBody, FilterResponse, KernelArgs, SessionInfo};
use boxbf_core::filter::{fast_bf, filter_with_cache, precompute_stacks};
use boxbf_core::synth::synthetic_image;
use boxbf_core::{load_pgm, save_pgm, Image};
use boxbf_service::{spawn_local, ServerHandle};
use serde_json::{json, Value};

async fn start() -> (ServerHandle, reqwest::Client) {
    (spawn_local().await.unwrap(), reqwest::Client::new())
}

fn b64(image: &Image) -> String {
    STANDARD.encode(save_pgm(image))
}

fn unb64(s: &str) -> Image {
    load_pgm(&STANDARD.decode(s).unwrap()).unwrap()
}

async fn post(http: &reqwest::Client, srv: &ServerHandle, path: &str, body: Value) -> reqwest::Response {
    http.post(format!("{}{path}", srv.base_url()))
        .json(&body)
        .send()
        .await
        .unwrap()
}

#[tokio::test]
async fn health_check() {
    let (srv, http) = start().await;
    let r = http.get(format!("{}/healthz", srv.base_url())).send().await.unwrap();
    assert_eq!(r.status(), 200);
    assert_eq!(r.text().await.unwrap(), "ok");
    srv.shutdown().await.unwrap();
}

#[tokio::test]
async fn fast_filter_matches_library() {
    let (srv, http) = start().await;
    let img = synthetic_image(40, 30, 3).unwrap();
    let r = post(
        &http,
        &srv,
        "/v1/filter",
        json!({"image": b64(&img), "method": "fast", "sigma_s": 3.0, "sigma_r": 30.0, "compare_oracle": true}),
    )
    .await;
    assert_eq!(r.status(), 200);
    let body: FilterResponse = r.json().await.unwrap();
    assert_eq!((body.width, body.height), (40, 30));
    let expected = fast_bf(&img, &KernelArgs::new(3.0, 30.0).to_params().unwrap())
        .unwrap()
        .image
        .quantized();
    assert_eq!(unb64(&body.image), expected);
    let m = body.metrics.expect("oracle comparison requested");
    assert!(m.psnr > 35.0, "{m:?}");
    assert!(body.diagnostics.is_some());
}

#[tokio::test]
async fn brute_filter_compares_perfectly_with_itself() {
    let (srv, http) = start().await;
    let img = synthetic_image(20, 20, 1).unwrap();
    let r = post(
        &http,
        &srv,
        "/v1/filter",
        json!({"image": b64(&img), "method": "brute", "sigma_s": 2.0, "sigma_r": 30.0, "compare_oracle": true}),
    )
    .await;
    let body: FilterResponse = r.json().await.unwrap();
    assert_eq!(body.metrics.unwrap().psnr, 120.0);
    assert!(body.diagnostics.is_none());
}

#[tokio::test]
async fn bad_input_is_a_json_error() {
    let (srv, http) = start().await;
    let r = post(
        &http,
        &srv,
        "/v1/filter",
        json!({"image": "***", "sigma_s": 2.0, "sigma_r": 30.0}),
    )
    .await;
    assert_eq!(r.status(), 400);
    let e: ErrorBody = r.json().await.unwrap();
    assert!(e.error.contains("base64"), "{}", e.error);

    let img = synthetic_image(8, 8, 0).unwrap();
    let r = post(
        &http,
        &srv,
        "/v1/filter",
        json!({"image": b64(&img), "sigma_s": -1.0, "sigma_r": 30.0}),
    )
    .await;
    assert_eq!(r.status(), 400);
    r.json::<ErrorBody>().await.unwrap();

    // missing required field
    let r = post(&http, &srv, "/v1/filter", json!({"image": b64(&img)})).await;
    assert!(r.status().is_client_error());
    let e: ErrorBody = r.json().await.unwrap();
    assert!(e.error.contains("sigma_s"), "{}", e.error);
}

#[tokio::test]
async fn approx_report_rows() {
    let (srv, http) = start().await;
    let r = post(
        &http,
        &srv,
        "/v1/approx-report",
        json!({"role": "range", "kernel": {"family": "gaussian", "sigma": 40.0}, "terms": 3}),
    )
    .await;
    assert_eq!(r.status(), 200);
    let body: ApproxReportResponse = r.json().await.unwrap();
    assert_eq!(body.summary, "N->M: 1:2 2:2 3:3 4:4 5:5 6:6 7:7 8:8");
    assert!(body.csv.starts_with("basis,index,coefficient,selected\n"));
}

#[tokio::test]
async fn bench_on_synthetic_input() {
    let (srv, http) = start().await;
    let config = json!({
        "radii": [2], "sigma_r": [30.0], "methods": ["brute", "fast"], "epsilon": 0.01,
        "spatial": {"mode": "fused", "level": 3}, "range_terms": 5, "m_factor": 20, "warmup": 0, "runs": 1
    });
    let r = post(
        &http,
        &srv,
        "/v1/bench",
        json!({"width": 24, "height": 16, "seed": 2, "config": config}),
    )
    .await;
    assert_eq!(r.status(), 200);
    let body: BenchResponse = r.json().await.unwrap();
    assert_eq!(body.rows.len(), 2);
    assert_eq!(body.rows[0].image_px, 24 * 16);
    assert_eq!(body.csv.lines().count(), 3);
}

#[tokio::test]
async fn session_lifecycle() {
    let (srv, http) = start().await;
    let img = synthetic_image(32, 24, 4).unwrap();
    let r = post(
        &http,
        &srv,
        "/v1/sessions",
        json!({"image": b64(&img), "radii": [60.0, 90.0, 120.0]}),
    )
    .await;
    assert_eq!(r.status(), 201);
    let info: SessionInfo = r.json().await.unwrap();
    assert_eq!(info.radii, vec![60.0, 90.0, 120.0]);
    assert_eq!((info.width, info.height), (32, 24));

    let url = format!("{}/v1/sessions/{}", srv.base_url(), info.id);
    let got: SessionInfo = http.get(&url).send().await.unwrap().json().await.unwrap();
    assert_eq!(got, info);

    let r = post(
        &http,
        &srv,
        &format!("/v1/sessions/{}/filter", info.id),
        json!({"sigma_s": 3.0, "sigma_r": 25.0}),
    )
    .await;
    assert_eq!(r.status(), 200);
    let body: FilterResponse = r.json().await.unwrap();
    assert_eq!(body.t_r, 90.0);
    let params = KernelArgs::new(3.0, 25.0).to_params().unwrap();
    let cache = precompute_stacks(&img, &[60.0, 90.0, 120.0]).unwrap();
    let expected = filter_with_cache(&img, &cache, &params).unwrap().image.quantized();
    assert_eq!(unb64(&body.image), expected);

    // σ_r = 60 needs T_r ≈ 182, beyond every cached radius
    let r = post(
        &http,
        &srv,
        &format!("/v1/sessions/{}/filter", info.id),
        json!({"sigma_s": 3.0, "sigma_r": 60.0}),
    )
    .await;
    assert_eq!(r.status(), 422);

    assert_eq!(http.delete(&url).send().await.unwrap().status(), 204);
    assert_eq!(http.delete(&url).send().await.unwrap().status(), 404);
    assert_eq!(http.get(&url).send().await.unwrap().status(), 404);
    let r = post(
        &http,
        &srv,
        "/v1/sessions/not-a-uuid/filter",
        json!({"sigma_s": 3.0, "sigma_r": 25.0}),
    )
    .await;
    assert_eq!(r.status(), 404);
}

#[tokio::test]
async fn descending_radii_rejected() {
    let (srv, http) = start().await;
    let img = synthetic_image(8, 8, 0).unwrap();
    let r = post(
        &http,
        &srv,
        "/v1/sessions",
        json!({"image": b64(&img), "radii": [90.0, 60.0]}),
    )
    .await;
    assert_eq!(r.status(), 400);
}
