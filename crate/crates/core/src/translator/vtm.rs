use std::collections::HashMap;

use crate::lexicon::BilingualLexicon;
use crate::tokenizer::normalize;

/// Word-by-word rewriting of target-language text into the source language.
///
/// Each whitespace-separated word is normalized; if it is a lexicon target it
/// becomes that target's first-listed source phrase, otherwise it is kept in
/// normalized form. Output words are joined with single spaces.
pub struct VtmRewriter<'a> {
    map: HashMap<&'a str, &'a str>,
}

impl<'a> VtmRewriter<'a> {
    pub fn new(lexicon: &'a BilingualLexicon) -> Self {
        Self {
            map: lexicon.first_source_by_target(),
        }
    }

    pub fn rewrite(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for raw in text.split_whitespace() {
            let word = normalize(raw);
            if word.is_empty() {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            match self.map.get(word.as_str()) {
                Some(source) => out.push_str(source),
                None => out.push_str(&word),
            }
        }
        out
    }
}

pub fn vtm_rewrite(text: &str, lexicon: &BilingualLexicon) -> String {
    VtmRewriter::new(lexicon).rewrite(text)
}
