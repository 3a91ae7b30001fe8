use std::path::Path;
use std::sync::Mutex;

use super::{check_request, ChatTurn, Completion, EndpointError, ModelClient};

/// Returns canned responses in file order, one per requested sample.
#[derive(Debug)]
pub struct ReplayClient {
    responses: Vec<String>,
    cursor: Mutex<usize>,
}

impl ReplayClient {
    pub fn new(responses: Vec<String>) -> Self {
        ReplayClient {
            responses,
            cursor: Mutex::new(0),
        }
    }

    /// Load a replay fixture: a JSON array of response strings.
    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let responses: Vec<String> =
            serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Ok(Self::new(responses))
    }

    pub fn remaining(&self) -> usize {
        self.responses.len() - *self.cursor.lock().unwrap()
    }
}

impl ModelClient for ReplayClient {
    fn complete(&self, turns: &[ChatTurn], temperature: f64, n_samples: u32) -> Result<Completion, EndpointError> {
        check_request(turns, temperature, n_samples)?;
        let mut cur = self.cursor.lock().unwrap();
        let n = n_samples as usize;
        if *cur + n > self.responses.len() {
            return Err(EndpointError::ReplayExhausted(self.responses.len()));
        }
        let texts = self.responses[*cur..*cur + n].to_vec();
        *cur += n;
        Ok(Completion { texts, usage: None })
    }
}
