//! HTTP adapter for chat-style completion endpoints.

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

use super::{ApiStyle, CompletionRequest, ProviderConfig, TextBackend, TransportError};

pub struct RemoteBackend {
    client: Client,
    endpoint: String,
    key: String,
    model: Option<String>,
    style: ApiStyle,
}

impl RemoteBackend {
    /// Reads the credential from the configured environment variable.
    pub fn from_config(config: &ProviderConfig) -> Result<Self, TransportError> {
        let endpoint = config
            .endpoint
            .clone()
            .ok_or_else(|| TransportError::Misconfigured("no endpoint".into()))?;
        if !(endpoint.starts_with("http://") || endpoint.starts_with("https://")) {
            return Err(TransportError::Misconfigured(format!("endpoint {endpoint:?} is not an http(s) URL")));
        }
        let var = config
            .credential_env
            .as_deref()
            .ok_or_else(|| TransportError::Misconfigured("no credential_env".into()))?;
        let key = std::env::var(var).map_err(|_| TransportError::Misconfigured(format!("environment variable {var} is not set")))?;
        let client = Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| TransportError::Misconfigured(e.to_string()))?;
        Ok(Self { client, endpoint, key, model: config.model.clone(), style: config.api_style })
    }

    fn body(&self, req: &CompletionRequest<'_>) -> Value {
        let mut body = json!({
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        });
        if let Some(m) = &self.model {
            body["model"] = json!(m);
        }
        body
    }
}

fn extract(style: ApiStyle, v: &Value) -> Option<String> {
    let text = match style {
        ApiStyle::ChatCompletions => v.pointer("/choices/0/message/content"),
        ApiStyle::Messages => v.pointer("/content/0/text"),
    };
    text.and_then(Value::as_str).map(str::to_string)
}

impl TextBackend for RemoteBackend {
    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, TransportError> {
        let builder = self.client.post(&self.endpoint).json(&self.body(req));
        let builder = match self.style {
            ApiStyle::ChatCompletions => builder.bearer_auth(&self.key),
            ApiStyle::Messages => builder.header("x-api-key", &self.key),
        };
        let resp = builder.send().map_err(|e| {
            if e.is_connect() || e.is_builder() {
                TransportError::Misconfigured(e.to_string())
            } else {
                TransportError::Failed(e.to_string())
            }
        })?;
        let status = resp.status();
        if matches!(status, StatusCode::UNAUTHORIZED | StatusCode::FORBIDDEN | StatusCode::NOT_FOUND) {
            return Err(TransportError::Misconfigured(format!("endpoint answered {status}")));
        }
        if !status.is_success() {
            return Err(TransportError::Failed(format!("endpoint answered {status}")));
        }
        let v: Value = resp.json().map_err(|e| TransportError::Failed(e.to_string()))?;
        // A well-formed reply without text counts as an unreadable answer.
        Ok(extract(self.style, &v).unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_both_styles() {
        let chat = json!({"choices": [{"message": {"content": "7"}}]});
        let msg = json!({"content": [{"type": "text", "text": "8.5"}]});
        assert_eq!(extract(ApiStyle::ChatCompletions, &chat).as_deref(), Some("7"));
        assert_eq!(extract(ApiStyle::Messages, &msg).as_deref(), Some("8.5"));
        assert_eq!(extract(ApiStyle::Messages, &chat), None);
    }

    #[test]
    fn missing_credential_is_misconfiguration() {
        let cfg = ProviderConfig {
            mode: super::super::ProviderMode::Remote,
            endpoint: Some("http://127.0.0.1:9".into()),
            credential_env: Some("BAYESORCH_TEST_UNSET_KEY_VARIABLE".into()),
            ..ProviderConfig::simulated("r")
        };
        assert!(matches!(RemoteBackend::from_config(&cfg), Err(TransportError::Misconfigured(_))));
    }
}
