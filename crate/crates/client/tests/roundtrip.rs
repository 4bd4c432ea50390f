use boxbf_client::{Client, ClientError};
use boxbf_core::api::{ApproxReportRequest, BenchRequest, FilterMethod, KernelArgs, KernelDescription};
use boxbf_core::approx::kernel::KernelRole;
use boxbf_core::bench::{BenchConfig, Method, CSV_HEADER};
use boxbf_core::filter::{fast_bf_with, TrigSource};
use boxbf_core::synth::synthetic_image;
use boxbf_core::Image;

async fn client() -> (boxbf_service::ServerHandle, Client) {
    let srv = boxbf_service::spawn_local().await.unwrap();
    let c = Client::new(srv.base_url());
    (srv, c)
}

#[tokio::test]
async fn filter_round_trip() {
    let (_srv, c) = client().await;
    c.health().await.unwrap();
    let img = synthetic_image(30, 20, 8).unwrap();
    let args = KernelArgs::new(2.0, 35.0);
    let out = c
        .filter(&img, FilterMethod::FastLut, args.clone(), false)
        .await
        .unwrap();
    let local = fast_bf_with(&img, &args.to_params().unwrap(), TrigSource::Lut)
        .unwrap()
        .image;
    assert_eq!(out.image, local.quantized());
    assert!(out.response.metrics.is_none());
    assert_eq!(out.pgm_bytes().unwrap()[..2], *b"P5");
}

#[tokio::test]
async fn constant_image_survives_the_wire() {
    let (_srv, c) = client().await;
    let img = Image::constant(9, 1, 200.0).unwrap();
    for method in [FilterMethod::Brute, FilterMethod::Fast] {
        let out = c.filter(&img, method, KernelArgs::new(1.5, 20.0), true).await.unwrap();
        assert_eq!(out.image, img);
        let m = out.response.metrics.unwrap();
        assert_eq!(m.psnr, 120.0);
        // too narrow for an 11-pixel SSIM window
        assert_eq!(m.ssim, None);
    }
}

#[tokio::test]
async fn service_errors_surface_with_status() {
    let (_srv, c) = client().await;
    let img = synthetic_image(8, 8, 0).unwrap();
    let mut args = KernelArgs::new(2.0, 30.0);
    args.spatial_terms = 9;
    let err = c.filter(&img, FilterMethod::Fast, args, false).await.unwrap_err();
    assert_eq!(err.status(), Some(400), "{err}");

    let err = c.session("00000000-0000-0000-0000-000000000000").await.unwrap_err();
    assert_eq!(err.status(), Some(404));
    assert!(matches!(err, ClientError::Api { .. }));
}

#[tokio::test]
async fn unreachable_server_is_a_transport_error() {
    // bind then drop to get a port nobody listens on
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let c = Client::new(format!("http://127.0.0.1:{port}"));
    let err = c.health().await.unwrap_err();
    assert!(matches!(err, ClientError::Transport { .. }), "{err}");
    assert_eq!(err.status(), None);
}

#[tokio::test]
async fn sessions_serve_cached_filtering() {
    let (_srv, c) = client().await;
    let img = synthetic_image(24, 24, 5).unwrap();
    let info = c.create_session(&img, vec![80.0, 130.0], 16).await.unwrap();
    let out = c
        .session_filter(&info.id, KernelArgs::new(2.0, 40.0), true)
        .await
        .unwrap();
    assert_eq!(out.response.t_r, 130.0);
    assert!(out.response.metrics.unwrap().psnr > 30.0);
    c.delete_session(&info.id).await.unwrap();
    assert_eq!(c.delete_session(&info.id).await.unwrap_err().status(), Some(404));
}

#[tokio::test]
async fn report_and_bench() {
    let (_srv, c) = client().await;
    let rep = c
        .approx_report(&ApproxReportRequest {
            role: KernelRole::Range,
            kernel: KernelDescription::Box { half_width: 30.0 },
            epsilon: 0.01,
            terms: 1,
            m_factor: 20,
            j_max: 4,
        })
        .await
        .unwrap();
    // a kernel that is constant on its support has only the scaling term
    assert_eq!(rep.report.nonzero_count(), 1);

    let bench = c
        .bench(&BenchRequest {
            image: None,
            width: Some(16),
            height: None,
            seed: 1,
            config: BenchConfig {
                radii: vec![2],
                methods: vec![Method::Fast, Method::Cached],
                warmup: 0,
                runs: 1,
                ..BenchConfig::default()
            },
        })
        .await
        .unwrap();
    assert!(bench.csv.starts_with(CSV_HEADER));
    assert_eq!(
        bench.rows.iter().map(|r| r.method).collect::<Vec<_>>(),
        vec![Method::Fast, Method::Cached]
    );
    assert_eq!(bench.rows[0].image_px, 256);
}
