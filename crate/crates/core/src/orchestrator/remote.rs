//! Chat-completion client: `POST {model, messages}` and read
//! `choices[0].message.content` from the reply.

use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::planner::{Planner, PlannerError, PlannerRequest};
use super::prompt::{PromptMessages, Role};

pub const URL_VAR: &str = "FOON_PLANNER_URL";
pub const MODEL_VAR: &str = "FOON_PLANNER_MODEL";
pub const TOKEN_VAR: &str = "FOON_PLANNER_TOKEN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    pub url: String,
    pub model: String,
    pub token: Option<String>,
    /// Extra attempts after the first failure.
    pub retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteConfig {
            url: url.into(),
            model: model.into(),
            token: None,
            retries: 3,
            backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(120),
        }
    }

    pub fn from_env() -> Result<Self, PlannerError> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        let url = var(URL_VAR).ok_or_else(|| PlannerError::Transport(format!("{URL_VAR} is not set")))?;
        let model = var(MODEL_VAR).unwrap_or_else(|| "default".to_string());
        let mut config = RemoteConfig::new(url, model);
        config.token = var(TOKEN_VAR);
        Ok(config)
    }
}

pub struct RemotePlanner {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

impl RemotePlanner {
    pub fn new(config: RemoteConfig) -> Result<Self, PlannerError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| PlannerError::Transport(e.to_string()))?;
        Ok(RemotePlanner { config, client })
    }

    pub fn complete(&self, prompt: &PromptMessages) -> Result<String, PlannerError> {
        let messages: Vec<Value> = prompt
            .messages
            .iter()
            .map(|m| {
                let role = match m.role {
                    Role::System => "system",
                    Role::User => "user",
                };
                json!({ "role": role, "content": m.content })
            })
            .collect();
        let body = json!({ "model": self.config.model, "messages": messages });
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                thread::sleep(self.config.backoff * 2u32.saturating_pow(attempt - 1));
            }
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(detail)) => return Err(PlannerError::Transport(detail)),
                Err(Attempt::Retry(detail)) => last = detail,
            }
        }
        Err(PlannerError::Transport(format!(
            "{} attempts failed, last: {last}",
            self.config.retries + 1
        )))
    }

    fn attempt(&self, body: &Value) -> Result<String, Attempt> {
        let mut request = self.client.post(&self.config.url).json(body);
        if let Some(token) = &self.config.token {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(format!("HTTP {status}")));
        }
        let reply: Value = response.json().map_err(|e| Attempt::Fatal(format!("unreadable reply: {e}")))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Attempt::Fatal("reply has no choices[0].message.content".to_string()))
    }
}

impl Planner for RemotePlanner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        self.complete(request.prompt)
    }
}
