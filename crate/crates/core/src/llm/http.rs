// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! OpenAI-compatible chat-completion adapter with exponential-backoff retry.

use std::time::Duration;

use serde_json::json;

use super::{temperature_warning, LlmClient, LlmConfig, LlmError, LlmRequest};

/// Longest response body excerpt kept in error messages.
const BODY_EXCERPT: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct HttpRequest {
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: String,
    pub timeout: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransportFailure {
    Timeout,
    Io(String),
}

/// Sends one HTTP POST. Implemented over `ureq` for real use and by hand in tests.
pub trait Transport: Send + Sync {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportFailure>;
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

#[derive(Debug, Default)]
pub struct UreqTransport;

impl Transport for UreqTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportFailure> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(request.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut builder = agent.post(&request.url);
        for (k, v) in &request.headers {
            builder = builder.header(k.as_str(), v.as_str());
        }
        match builder.send(request.body.as_str()) {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let body = resp
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| TransportFailure::Io(e.to_string()))?;
                Ok(HttpResponse { status, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(TransportFailure::Timeout),
            Err(e) => Err(TransportFailure::Io(e.to_string())),
        }
    }
}

fn excerpt(body: &str) -> String {
    match body.char_indices().nth(BODY_EXCERPT) {
        Some((i, _)) => format!("{}...", &body[..i]),
        None => body.to_string(),
    }
}

fn redact(text: &str, secret: Option<&str>) -> String {
    match secret {
        Some(s) if !s.is_empty() => text.replace(s, "[REDACTED]"),
        _ => text.to_string(),
    }
}

fn retryable(status: u16) -> bool {
    status == 429 || status >= 500
}

pub struct HttpClient<T = UreqTransport, S = ThreadSleeper> {
    config: LlmConfig,
    api_key: Option<String>,
    transport: T,
    sleeper: S,
}

impl HttpClient {
    pub fn new(config: LlmConfig) -> Result<Self, LlmError> {
        Self::with_transport(config, UreqTransport, ThreadSleeper)
    }
}

impl<T: Transport, S: Sleeper> HttpClient<T, S> {
    pub fn with_transport(config: LlmConfig, transport: T, sleeper: S) -> Result<Self, LlmError> {
        config.validate()?;
        if let Some(w) = temperature_warning(config.temperature) {
            log::warn!("temperature {}: {w}", config.temperature);
        }
        let api_key = config.api_key();
        Ok(Self {
            config,
            api_key,
            transport,
            sleeper,
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    /// The JSON request body for a single-turn completion.
    pub fn request_body(&self, system: &str, user: &str) -> String {
        json!({
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.config.temperature,
        })
        .to_string()
    }

    /// One chat completion, retried on timeouts, I/O errors, 429 and 5xx.
    pub fn chat(&self, system: &str, user: &str) -> Result<String, LlmError> {
        let mut headers = vec![("Content-Type".to_string(), "application/json".to_string())];
        if let Some(key) = &self.api_key {
            headers.push(("Authorization".to_string(), format!("Bearer {key}")));
        }
        let request = HttpRequest {
            url: self.config.endpoint_url.clone(),
            headers,
            body: self.request_body(system, user),
            timeout: self.config.timeout(),
        };
        let secret = self.api_key.as_deref();
        let mut last_err = None;
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                let factor = 2f64.powi(attempt as i32 - 1);
                self.sleeper
                    .sleep(Duration::from_secs_f64(self.config.backoff_base_secs * factor));
            }
            let err = match self.transport.send(&request) {
                Ok(resp) if (200..300).contains(&resp.status) => {
                    return extract_content(&resp.body).ok_or_else(|| LlmError::Transport {
                        status: Some(resp.status),
                        body: redact(&excerpt(&resp.body), secret),
                    });
                }
                Ok(resp) => {
                    let err = LlmError::Transport {
                        status: Some(resp.status),
                        body: redact(&excerpt(&resp.body), secret),
                    };
                    if !retryable(resp.status) {
                        return Err(err);
                    }
                    err
                }
                Err(TransportFailure::Timeout) => LlmError::Timeout(request.timeout),
                Err(TransportFailure::Io(msg)) => LlmError::Transport {
                    status: None,
                    body: redact(&msg, secret),
                },
            };
            log::debug!("llm attempt {} failed: {err}", attempt + 1);
            last_err = Some(err);
        }
        Err(last_err.expect("at least one attempt"))
    }
}

fn extract_content(body: &str) -> Option<String> {
    let v: serde_json::Value = serde_json::from_str(body).ok()?;
    v.pointer("/choices/0/message/content")?.as_str().map(str::to_string)
}

impl<T: Transport, S: Sleeper> LlmClient for HttpClient<T, S> {
    fn identity(&self) -> String {
        self.config.model_name.clone()
    }

    fn complete(&self, request: &LlmRequest<'_>) -> Result<String, LlmError> {
        self.chat(request.system, request.user)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::VecDeque;
    use std::sync::Mutex;

    use super::*;

    struct Scripted(
        Mutex<VecDeque<Result<HttpResponse, TransportFailure>>>,
        Mutex<Vec<HttpRequest>>,
    );

    impl Scripted {
        fn new(items: Vec<Result<HttpResponse, TransportFailure>>) -> Self {
            Self(Mutex::new(items.into()), Mutex::new(Vec::new()))
        }
    }

    impl Transport for Scripted {
        fn send(&self, request: &HttpRequest) -> Result<HttpResponse, TransportFailure> {
            self.1.lock().unwrap().push(request.clone());
            self.0.lock().unwrap().pop_front().expect("script exhausted")
        }
    }

    #[derive(Default)]
    struct Recorder(Mutex<Vec<Duration>>);

    impl Sleeper for &Recorder {
        fn sleep(&self, d: Duration) {
            self.0.lock().unwrap().push(d);
        }
    }

    fn ok(content: &str) -> Result<HttpResponse, TransportFailure> {
        Ok(HttpResponse {
            status: 200,
            body: json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string(),
        })
    }

    fn config(retries: u32) -> LlmConfig {
        LlmConfig {
            endpoint_url: "http://llm.invalid/v1/chat/completions".into(),
            max_retries: retries,
            api_key_env_var: "SAFLITE_TEST_KEY_UNSET".into(),
            ..LlmConfig::default()
        }
    }

    #[test]
    fn passes_body_through_verbatim() {
        let rec = Recorder::default();
        let client =
            HttpClient::with_transport(config(0), Scripted::new(vec![ok("Score: 8 out of 10")]), &rec).unwrap();
        assert_eq!(client.chat("sys", "user").unwrap(), "Score: 8 out of 10");
        let sent = client.transport.1.lock().unwrap()[0].clone();
        let body: serde_json::Value = serde_json::from_str(&sent.body).unwrap();
        assert_eq!(body["model"], "gpt-3.5-turbo");
        assert_eq!(body["temperature"], 0.0);
        assert_eq!(body["messages"][1]["content"], "user");
    }

    #[test]
    fn two_failures_then_success_backs_off_twice() {
        let rec = Recorder::default();
        let script = Scripted::new(vec![
            Err(TransportFailure::Timeout),
            Ok(HttpResponse {
                status: 503,
                body: "busy".into(),
            }),
            ok("done"),
        ]);
        let client = HttpClient::with_transport(config(3), script, &rec).unwrap();
        assert_eq!(client.chat("s", "u").unwrap(), "done");
        assert_eq!(*rec.0.lock().unwrap(), [Duration::from_secs(1), Duration::from_secs(2)]);
    }

    #[test]
    fn exhausted_retries_surface_last_error() {
        let rec = Recorder::default();
        let script = Scripted::new(vec![
            Ok(HttpResponse {
                status: 500,
                body: "x".repeat(2000),
            }),
            Ok(HttpResponse {
                status: 502,
                body: "bad gateway".into(),
            }),
        ]);
        let client = HttpClient::with_transport(config(1), script, &rec).unwrap();
        assert_eq!(
            client.chat("s", "u").unwrap_err(),
            LlmError::Transport {
                status: Some(502),
                body: "bad gateway".into()
            }
        );

        let script = Scripted::new(vec![Err(TransportFailure::Timeout)]);
        let client = HttpClient::with_transport(config(0), script, &rec).unwrap();
        assert!(matches!(client.chat("s", "u"), Err(LlmError::Timeout(_))));
    }

    #[test]
    fn client_errors_are_not_retried_and_are_truncated() {
        let rec = Recorder::default();
        let script = Scripted::new(vec![Ok(HttpResponse {
            status: 401,
            body: "y".repeat(2000),
        })]);
        let client = HttpClient::with_transport(config(3), script, &rec).unwrap();
        match client.chat("s", "u").unwrap_err() {
            LlmError::Transport { status, body } => {
                assert_eq!(status, Some(401));
                assert!(body.len() < 600);
            }
            other => panic!("{other:?}"),
        }
        assert!(rec.0.lock().unwrap().is_empty());
    }

    #[test]
    fn redaction_hides_secret() {
        assert_eq!(redact("key=abc123!", Some("abc123")), "key=[REDACTED]!");
        assert_eq!(redact("plain", None), "plain");
    }
}
