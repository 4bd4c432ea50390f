//! Async client for the box bilateral filter service.
//!
//! ```no_run
//! # async fn demo(image: boxbf_core::Image) -> Result<(), boxbf_client::ClientError> {
//! use boxbf_client::Client;
//! use boxbf_core::api::{FilterMethod, KernelArgs};
//!
//! let client = Client::new("http://127.0.0.1:8080");
//! let out = client.filter(&image, FilterMethod::Fast, KernelArgs::new(3.0, 30.0), false).await?;
//! println!("{} ms", out.response.wall_ms);
//! # Ok(())
//! # }
//! ```

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use boxbf_core::api::{
    ApproxReportRequest, ApproxReportResponse, BenchRequest, BenchResponse, ErrorBody, FilterMethod, FilterRequest,
    FilterResponse, KernelArgs, PrecomputeRequest, SessionFilterRequest, SessionInfo,
};
use boxbf_core::{load_pgm, save_pgm, Image};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request to {url} failed: {source}")]
    Transport {
        url: String,
        #[source]
        source: reqwest::Error,
    },
    /// The service answered with a non-success status.
    #[error("service returned {status}: {message}")]
    Api { status: u16, message: String },
    #[error("malformed image in response: {0}")]
    Image(#[from] boxbf_core::Error),
    #[error("malformed base64 in response: {0}")]
    Base64(#[from] base64::DecodeError),
}

impl ClientError {
    /// HTTP status for service-side errors.
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            _ => None,
        }
    }
}

pub type Result<T, E = ClientError> = std::result::Result<T, E>;

/// A filter response with its image already decoded.
#[derive(Debug, Clone)]
pub struct Filtered {
    pub image: Image,
    pub response: FilterResponse,
}

impl Filtered {
    /// The P5 bytes exactly as the service produced them.
    pub fn pgm_bytes(&self) -> Result<Vec<u8>> {
        Ok(STANDARD.decode(&self.response.image)?)
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

pub fn encode_image(image: &Image) -> String {
    STANDARD.encode(save_pgm(image))
}

pub fn decode_image(b64: &str) -> Result<Image> {
    Ok(load_pgm(&STANDARD.decode(b64)?)?)
}

impl Client {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_http(base_url, reqwest::Client::new())
    }

    pub fn with_http(base_url: impl Into<String>, http: reqwest::Client) -> Self {
        let base = base_url.into().trim_end_matches('/').to_owned();
        Self { base, http }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn finish<T: DeserializeOwned>(&self, url: String, sent: reqwest::Result<reqwest::Response>) -> Result<T> {
        let transport = |source| ClientError::Transport {
            url: url.clone(),
            source,
        };
        let resp = sent.map_err(transport)?;
        let status = resp.status();
        if status.is_success() {
            return resp.json().await.map_err(transport);
        }
        let text = resp.text().await.map_err(transport)?;
        let message = serde_json::from_str::<ErrorBody>(&text)
            .map(|b| b.error)
            .unwrap_or(text);
        Err(ClientError::Api {
            status: status.as_u16(),
            message,
        })
    }

    async fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T> {
        let url = self.url(path);
        let sent = self.http.post(&url).json(body).send().await;
        self.finish(url, sent).await
    }

    pub async fn health(&self) -> Result<()> {
        let url = self.url("/healthz");
        let sent = self.http.get(&url).send().await;
        let resp = sent.map_err(|source| ClientError::Transport { url, source })?;
        if resp.status().is_success() {
            Ok(())
        } else {
            Err(ClientError::Api {
                status: resp.status().as_u16(),
                message: "health check failed".into(),
            })
        }
    }

    pub async fn filter(
        &self,
        image: &Image,
        method: FilterMethod,
        kernel: KernelArgs,
        compare_oracle: bool,
    ) -> Result<Filtered> {
        let req = FilterRequest {
            image: encode_image(image),
            method,
            kernel,
            compare_oracle,
        };
        let response: FilterResponse = self.post("/v1/filter", &req).await?;
        Ok(Filtered {
            image: decode_image(&response.image)?,
            response,
        })
    }

    pub async fn bench(&self, req: &BenchRequest) -> Result<BenchResponse> {
        self.post("/v1/bench", req).await
    }

    pub async fn approx_report(&self, req: &ApproxReportRequest) -> Result<ApproxReportResponse> {
        self.post("/v1/approx-report", req).await
    }

    pub async fn create_session(&self, image: &Image, radii: Vec<f64>, max_frequency: usize) -> Result<SessionInfo> {
        let req = PrecomputeRequest {
            image: encode_image(image),
            radii,
            max_frequency,
        };
        self.post("/v1/sessions", &req).await
    }

    pub async fn session(&self, id: &str) -> Result<SessionInfo> {
        let url = self.url(&format!("/v1/sessions/{id}"));
        let sent = self.http.get(&url).send().await;
        self.finish(url, sent).await
    }

    pub async fn session_filter(&self, id: &str, kernel: KernelArgs, compare_oracle: bool) -> Result<Filtered> {
        let req = SessionFilterRequest { kernel, compare_oracle };
        let response: FilterResponse = self.post(&format!("/v1/sessions/{id}/filter"), &req).await?;
        Ok(Filtered {
            image: decode_image(&response.image)?,
            response,
        })
    }

    pub async fn delete_session(&self, id: &str) -> Result<()> {
        let url = self.url(&format!("/v1/sessions/{id}"));
        let sent = self.http.delete(&url).send().await;
        let resp = sent.map_err(|source| ClientError::Transport {
            url: url.clone(),
            source,
        })?;
        if resp.status().is_success() {
            return Ok(());
        }
        let status = resp.status().as_u16();
        let text = resp
            .text()
            .await
            .map_err(|source| ClientError::Transport { url, source })?;
        let message = serde_json::from_str::<ErrorBody>(&text)
            .map(|b| b.error)
            .unwrap_or(text);
        Err(ClientError::Api { status, message })
    }
}
