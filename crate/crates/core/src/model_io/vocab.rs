use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const UNK_TOKEN: &str = "[UNK]";

/// Special tokens every vocabulary must contain.
pub const REQUIRED_SPECIALS: [&str; 5] = ["[PAD]", UNK_TOKEN, "[CLS]", "[SEP]", "[MASK]"];

/// Ordered token table. A token's id is its position.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    unk_id: u32,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for Vocabulary {}

fn check_token(token: &str, line: usize) -> Result<()> {
    if token.is_empty() {
        return Err(Error::EmptyToken { line });
    }
    if token.contains(['\n', '\r']) {
        return Err(Error::InvalidToken {
            line,
            reason: "token contains a line break".into(),
        });
    }
    Ok(())
}

impl Vocabulary {
    /// Build a vocabulary from tokens in id order.
    ///
    /// Line numbers in errors are 1-based positions in `tokens`.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            check_token(tok, i + 1)?;
            if let Some(prev) = index.insert(tok.clone(), i as u32) {
                return Err(Error::DuplicateToken {
                    token: tok.clone(),
                    first_line: prev as usize + 1,
                    second_line: i + 1,
                });
            }
        }
        let missing: Vec<String> = REQUIRED_SPECIALS
            .iter()
            .filter(|s| !index.contains_key(**s))
            .map(|s| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingSpecials(missing));
        }
        let unk_id = index[UNK_TOKEN];
        Ok(Self {
            tokens,
            index,
            unk_id,
        })
    }

    /// Parse vocabulary file contents. A missing final newline is tolerated.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Self::new(Vec::new());
        }
        let tokens = body.split('\n').map(str::to_owned).collect();
        Self::new(tokens)
    }

    /// File contents: every token followed by a single LF.
    pub fn to_file_string(&self) -> String {
        let cap = self.tokens.iter().map(|t| t.len() + 1).sum();
        let mut out = String::with_capacity(cap);
        for tok in &self.tokens {
            out.push_str(tok);
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false: the required specials make an empty vocabulary unrepresentable.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    pub fn is_special(&self, token: &str) -> bool {
        REQUIRED_SPECIALS.contains(&token)
    }

    /// Append a token, returning its id.
    pub fn push(&mut self, token: String) -> Result<u32> {
        let id = self.tokens.len() as u32;
        check_token(&token, id as usize + 1)?;
        if let Some(prev) = self.index.get(&token) {
            return Err(Error::DuplicateToken {
                token,
                first_line: *prev as usize + 1,
                second_line: id as usize + 1,
            });
        }
        self.index.insert(token.clone(), id);
        self.tokens.push(token);
        Ok(id)
    }

    /// Replace the string at `id`, keeping the id. Specials cannot be renamed.
    pub fn rename(&mut self, id: u32, token: String) -> Result<()> {
        let line = id as usize + 1;
        check_token(&token, line)?;
        let old = self
            .tokens
            .get(id as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("token id {id} out of range")))?;
        if self.is_special(old) {
            return Err(Error::InvalidArgument(format!(
                "special token {old:?} cannot be renamed"
            )));
        }
        if let Some(prev) = self.index.get(&token) {
            return Err(Error::DuplicateToken {
                token,
                first_line: *prev as usize + 1,
                second_line: line,
            });
        }
        let old = std::mem::replace(&mut self.tokens[id as usize], token.clone());
        self.index.remove(&old);
        self.index.insert(token, id);
        Ok(())
    }
}

pub fn read_vocab(path: impl AsRef<Path>) -> Result<Vocabulary> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, e.utf8_error()),
        )
    })?;
    Vocabulary::parse(&text)
}

pub fn write_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, vocab.to_file_string()).map_err(|e| Error::io(path, e))
}
