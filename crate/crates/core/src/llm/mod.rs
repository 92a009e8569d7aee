// Copyright 2026 The saflite Authors
// SPDX-License-Identifier: Apache-2.0

//! LLM client abstraction.
//!
//! [`LlmClient`] is what the oracle talks to. Two families implement it: the
//! chat-completion wire adapter in [`http`] and the deterministic test doubles
//! in [`mock`]. Requests carry both the rendered prompt text and the
//! structured inputs it was rendered from, so that a mock can answer from
//! ground truth while a real model only ever sees the text.

pub mod http;
pub mod mock;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{InterestingnessDefinition, SystemState, TestCase};

pub use http::{HttpClient, HttpRequest, HttpResponse, Sleeper, Transport, TransportFailure, UreqTransport};
pub use mock::{KeywordRule, MockClient, MockMode, MockOracleConfig, OfflineClient};

pub const ENV_URL: &str = "SAFLITE_LLM_URL";
pub const ENV_MODEL: &str = "SAFLITE_LLM_MODEL";
pub const ENV_KEY: &str = "SAFLITE_LLM_KEY";

/// Temperatures at or above this are warned about.
pub const HIGH_TEMPERATURE: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LlmError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("transport error (status {status:?}): {body}")]
    Transport { status: Option<u16>, body: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub timeout_secs: f64,
    pub max_retries: u32,
    pub api_key_env_var: String,
    /// First backoff delay; doubled after every failed attempt.
    pub backoff_base_secs: f64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint_url: String::new(),
            model_name: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            timeout_secs: 60.0,
            max_retries: 3,
            api_key_env_var: ENV_KEY.into(),
            backoff_base_secs: 1.0,
        }
    }
}

impl LlmConfig {
    /// Reads the endpoint and model from `SAFLITE_LLM_URL` / `SAFLITE_LLM_MODEL`.
    pub fn from_env() -> Result<Self, LlmError> {
        let endpoint_url = std::env::var(ENV_URL)
            .ok()
            .filter(|v| !v.trim().is_empty())
            .ok_or_else(|| {
                LlmError::Config(format!(
                    "{ENV_URL} is not set; point it at an OpenAI-compatible /v1/chat/completions endpoint"
                ))
            })?;
        let mut cfg = Self {
            endpoint_url,
            ..Self::default()
        };
        if let Ok(model) = std::env::var(ENV_MODEL) {
            if !model.trim().is_empty() {
                cfg.model_name = model;
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.endpoint_url.trim().is_empty() {
            return Err(LlmError::Config("endpoint_url is empty".into()));
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(LlmError::Config("timeout must be positive".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if !(self.backoff_base_secs >= 0.0 && self.backoff_base_secs.is_finite()) {
            return Err(LlmError::Config("backoff base must be non-negative".into()));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    pub fn api_key(&self) -> Option<String> {
        std::env::var(&self.api_key_env_var).ok().filter(|k| !k.is_empty())
    }
}

/// Warning text for temperatures that make scores unreliable, if any.
pub fn temperature_warning(temperature: f64) -> Option<&'static str> {
    (temperature >= HIGH_TEMPERATURE).then_some("high temperature degrades ranking")
}

/// What a request is about, for clients that answer from structure.
#[derive(Clone, Copy, Debug)]
pub enum RequestSubject<'a> {
    Mutants {
        definition: &'a InterestingnessDefinition,
        state: &'a SystemState,
        mutants: &'a [TestCase],
    },
    LogSummary {
        definition: &'a InterestingnessDefinition,
        summary: &'a str,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct LlmRequest<'a> {
    pub system: &'a str,
    pub user: &'a str,
    pub subject: RequestSubject<'a>,
}

/// A single-turn text completion service.
pub trait LlmClient: Send + Sync {
    /// Model name, or `mock:<mode>` for test doubles.
    fn identity(&self) -> String;

    fn complete(&self, request: &LlmRequest<'_>) -> Result<String, LlmError>;
}

impl<T: LlmClient + ?Sized> LlmClient for Box<T> {
    fn identity(&self) -> String {
        (**self).identity()
    }

    fn complete(&self, request: &LlmRequest<'_>) -> Result<String, LlmError> {
        (**self).complete(request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_temperature_is_flagged() {
        assert_eq!(temperature_warning(1.0), Some("high temperature degrades ranking"));
        assert_eq!(temperature_warning(0.0), None);
        assert_eq!(LlmConfig::default().temperature, 0.0);
    }

    #[test]
    fn validation() {
        let mut c = LlmConfig {
            endpoint_url: "http://localhost:1".into(),
            ..LlmConfig::default()
        };
        assert!(c.validate().is_ok());
        c.timeout_secs = 0.0;
        assert!(c.validate().is_err());
        c.timeout_secs = 1.0;
        c.temperature = 2.5;
        assert!(c.validate().is_err());
        assert!(LlmConfig::default().validate().is_err());
    }
}
