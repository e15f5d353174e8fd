//! Chat-completion clients: an OpenAI-compatible HTTP client and replay mocks.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: "user".into(),
            content: content.into(),
        }
    }
}

/// One completion request. Field order is the wire order and the digest order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    /// Hex SHA-256 of the request's canonical JSON; the key mocks replay by.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("requests always serialize");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlmError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("no canned response for request digest {0}")]
    NoCannedResponse(String),
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

/// Talks to any server exposing `POST {endpoint}/chat/completions`.
pub struct OpenAiClient {
    url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    max_attempts: u32,
    backoff: Duration,
}

#[derive(Deserialize)]
struct CompletionBody {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: ChatMessage,
}

impl OpenAiClient {
    pub fn new(endpoint: &str, api_key: Option<String>) -> Self {
        let trimmed = endpoint.trim_end_matches('/');
        let url = if trimmed.ends_with("/chat/completions") {
            trimmed.to_string()
        } else {
            format!("{trimmed}/chat/completions")
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        OpenAiClient {
            url,
            api_key,
            agent,
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    /// Key read from the named environment variable, if set.
    pub fn from_env(endpoint: &str, api_key_env: &str) -> Self {
        Self::new(endpoint, std::env::var(api_key_env).ok().filter(|k| !k.is_empty()))
    }

    pub fn with_backoff(mut self, base: Duration) -> Self {
        self.backoff = base;
        self
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    fn attempt(&self, request: &ChatRequest) -> Result<String, Attempt> {
        let mut call = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = call
            .send_json(request)
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status().as_u16();
        if status == 429 || status >= 500 {
            let body = response.body_mut().read_to_string().unwrap_or_default();
            return Err(Attempt::Retry(format!("HTTP {status}: {body}")));
        }
        if status >= 400 {
            let body = response.body_mut().read_to_string().unwrap_or_default();
            return Err(Attempt::Fatal(LlmError::Http { status, body }));
        }
        let body: CompletionBody = response
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Fatal(LlmError::BadResponse(e.to_string())))?;
        body.choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| Attempt::Fatal(LlmError::BadResponse("no choices".into())))
    }
}

enum Attempt {
    Retry(String),
    Fatal(LlmError),
}

impl LlmClient for OpenAiClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let mut last = String::new();
        for attempt in 1..=self.max_attempts {
            match self.attempt(request) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => {
                    log::warn!("completion attempt {attempt}/{} failed: {msg}", self.max_attempts);
                    last = msg;
                    if attempt < self.max_attempts {
                        std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
                    }
                }
            }
        }
        Err(LlmError::Transport {
            attempts: self.max_attempts,
            message: last,
        })
    }
}

/// Replays canned completions keyed by request digest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockLlm {
    responses: BTreeMap<String, String>,
}

impl MockLlm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, request: &ChatRequest, response: impl Into<String>) {
        self.responses.insert(request.digest(), response.into());
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string maps always serialize")
    }
}

impl LlmClient for MockLlm {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let digest = request.digest();
        self.responses
            .get(&digest)
            .cloned()
            .ok_or(LlmError::NoCannedResponse(digest))
    }
}

/// Answers with a closure; handy for scripted tests.
pub struct FnLlm<F>(pub F);

impl<F> LlmClient for FnLlm<F>
where
    F: Fn(&ChatRequest) -> Result<String, LlmError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        (self.0)(request)
    }
}

/// Forwards to another client and keeps every exchange, to build a [`MockLlm`] later.
pub struct RecordingLlm<C> {
    inner: C,
    recorded: Mutex<MockLlm>,
}

impl<C: LlmClient> RecordingLlm<C> {
    pub fn new(inner: C) -> Self {
        RecordingLlm {
            inner,
            recorded: Mutex::new(MockLlm::new()),
        }
    }

    pub fn into_mock(self) -> MockLlm {
        self.recorded.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}

impl<C: LlmClient> LlmClient for RecordingLlm<C> {
    fn complete(&self, request: &ChatRequest) -> Result<String, LlmError> {
        let text = self.inner.complete(request)?;
        self.recorded
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(request, text.clone());
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(content: &str) -> ChatRequest {
        ChatRequest {
            model: "m".into(),
            messages: vec![ChatMessage::user(content)],
            temperature: 1.0,
            top_p: 0.95,
            max_tokens: 512,
            seed: Some(3),
        }
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        assert_eq!(request("a").digest(), request("a").digest());
        assert_ne!(request("a").digest(), request("b").digest());
        let mut other = request("a");
        other.temperature = 0.3;
        assert_ne!(other.digest(), request("a").digest());
        assert_eq!(request("a").digest().len(), 64);
    }

    #[test]
    fn mock_replays_and_round_trips() {
        let mut m = MockLlm::new();
        m.insert(&request("hi"), "hello");
        assert_eq!(m.complete(&request("hi")).unwrap(), "hello");
        assert!(matches!(m.complete(&request("bye")), Err(LlmError::NoCannedResponse(_))));
        assert_eq!(MockLlm::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn recorder_builds_a_mock() {
        let rec = RecordingLlm::new(FnLlm(|r: &ChatRequest| Ok(r.messages[0].content.to_uppercase())));
        assert_eq!(rec.complete(&request("abc")).unwrap(), "ABC");
        let mock = rec.into_mock();
        assert_eq!(mock.complete(&request("abc")).unwrap(), "ABC");
    }

    #[test]
    fn endpoint_url() {
        assert_eq!(
            OpenAiClient::new("http://localhost:8000/v1/", None).url(),
            "http://localhost:8000/v1/chat/completions"
        );
        assert_eq!(
            OpenAiClient::new("http://x/v1/chat/completions", None).url(),
            "http://x/v1/chat/completions"
        );
    }

    #[test]
    fn unreachable_server_is_a_transport_error_after_three_attempts() {
        // port 9 on loopback is reserved and refuses connections
        let c = OpenAiClient::new("http://127.0.0.1:9/v1", None).with_backoff(Duration::from_millis(1));
        match c.complete(&request("x")) {
            Err(LlmError::Transport { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("{other:?}"),
        }
    }
}
