//! HTTP service over one loaded model.
//!
//! | method | path               | body                     | response                  |
//! |--------|--------------------|--------------------------|---------------------------|
//! | GET    | `/model`           |                          | [`ModelInfo`]             |
//! | POST   | `/predict`         | [`PredictRequest`]       | `Prediction`              |
//! | POST   | `/counterfactuals` | [`CounterfactualsRequest`] | [`CounterfactualsResponse`] |
//! | POST   | `/ice`             | [`IceRequest`]           | [`IceResponse`]           |
//!
//! Malformed bodies get 400 with the offending field path, instances whose
//! feature names do not match the model get 409, and searches with no
//! answer get 200 with an empty list and a reason code.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::api::{self, classify_error, ErrorBody, ErrorKind, ModelInfo};
use crate::persist::ModelFile;

pub const DEFAULT_DEADLINE: Duration = Duration::from_secs(10);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Budget for one counterfactual search; partial results after it.
    pub deadline: Duration,
    /// Origin allowed by CORS; any origin when `None`.
    pub allow_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            deadline: DEFAULT_DEADLINE,
            allow_origin: None,
        }
    }
}

#[derive(Clone)]
struct AppState {
    file: Arc<ModelFile>,
    info: Arc<ModelInfo>,
    deadline: Duration,
}

pub fn router(file: ModelFile, config: &ServiceConfig) -> Result<Router, confcf_core::Error> {
    let info = ModelInfo::new(&file)?;
    let state = AppState {
        file: Arc::new(file),
        info: Arc::new(info),
        deadline: config.deadline,
    };
    let origin = match &config.allow_origin {
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o)
                .map_err(|_| confcf_core::Error::InvalidConfig(format!("bad origin `{o}`")))?,
        ),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Ok(Router::new()
        .route("/model", get(model_info))
        .route("/predict", post(predict))
        .route("/counterfactuals", post(counterfactuals))
        .route("/ice", post(ice))
        .fallback(not_found)
        .layer(cors)
        .with_state(state))
}

/// Serves `router` on `listener` until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

struct ApiError(StatusCode, ErrorBody);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<confcf_core::Error> for ApiError {
    fn from(e: confcf_core::Error) -> Self {
        let (kind, body) = classify_error(&e);
        let status = match kind {
            ErrorKind::Invalid => StatusCode::BAD_REQUEST,
            ErrorKind::SchemaMismatch => StatusCode::CONFLICT,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, body)
    }
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError(
            StatusCode::BAD_REQUEST,
            ErrorBody {
                error: "malformed_body".into(),
                message: e.inner().to_string(),
                field: (path != ".").then_some(path),
            },
        )
    })
}

async fn blocking<T, F>(f: F) -> Result<Json<T>, ApiError>
where
    T: Serialize + Send + 'static,
    F: FnOnce() -> Result<T, confcf_core::Error> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(result) => result.map(Json).map_err(ApiError::from),
        Err(join) => Err(ApiError(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorBody {
                error: "internal".into(),
                message: join.to_string(),
                field: None,
            },
        )),
    }
}

async fn model_info(State(state): State<AppState>) -> Json<ModelInfo> {
    Json((*state.info).clone())
}

async fn predict(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: api::PredictRequest = parse(&body)?;
    Ok(blocking(move || api::predict(&state.file, &request))
        .await?
        .into_response())
}

async fn counterfactuals(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: api::CounterfactualsRequest = parse(&body)?;
    let deadline = Instant::now() + state.deadline;
    Ok(blocking(move || {
        let query = api::query_from_request(&state.file, &request)?;
        let mut stop = || Instant::now() >= deadline;
        api::counterfactuals(&state.file, &query, &mut stop).map(|(response, _)| response)
    })
    .await?
    .into_response())
}

async fn ice(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: api::IceRequest = parse(&body)?;
    Ok(blocking(move || api::ice(&state.file, &request))
        .await?
        .into_response())
}

async fn not_found() -> ApiError {
    ApiError(
        StatusCode::NOT_FOUND,
        ErrorBody {
            error: "not_found".into(),
            message: "no such route".into(),
            field: None,
        },
    )
}
