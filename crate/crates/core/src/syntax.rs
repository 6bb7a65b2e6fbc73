//! Helpers for the compact `kind:key=value,...` text syntax used for probe
//! states and priors on the command line.

use crate::error::{Error, Result};

pub(crate) fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Split `kind:params` into its two halves. A bare `kind` yields empty params.
pub(crate) fn split_kind(input: &str) -> (&str, &str) {
    match input.split_once(':') {
        Some((k, rest)) => (k.trim(), rest.trim()),
        None => (input.trim(), ""),
    }
}

/// Parsed `key=value` list. Keys are unique and must all be consumed.
pub(crate) struct Params<'a> {
    input: &'a str,
    pairs: Vec<(&'a str, &'a str, bool)>,
}

impl<'a> Params<'a> {
    pub(crate) fn parse(input: &'a str, params: &'a str) -> Result<Self> {
        let mut pairs: Vec<(&str, &str, bool)> = Vec::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| parse_error(input, format!("expected key=value, got {item:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if pairs.iter().any(|(key, _, _)| *key == k) {
                return Err(parse_error(input, format!("duplicate key {k:?}")));
            }
            pairs.push((k, v, false));
        }
        Ok(Self { input, pairs })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.pairs.iter_mut().find(|(k, _, _)| *k == key).map(|p| {
            p.2 = true;
            p.1
        })
    }

    pub(crate) fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| parse_error(self.input, format!("{key}={v:?} is not a number"))),
        }
    }

    pub(crate) fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u64>()
                .map(Some)
                .map_err(|_| parse_error(self.input, format!("{key}={v:?} is not a non-negative integer"))),
        }
    }

    pub(crate) fn required_f64(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| parse_error(self.input, format!("missing {key}=")))
    }

    pub(crate) fn required_u64(&mut self, key: &str) -> Result<u64> {
        self.u64(key)?
            .ok_or_else(|| parse_error(self.input, format!("missing {key}=")))
    }

    /// Fails on any key that was never read.
    pub(crate) fn finish(self) -> Result<()> {
        match self.pairs.iter().find(|(_, _, used)| !used) {
            Some((k, _, _)) => Err(parse_error(self.input, format!("unknown key {k:?}"))),
            None => Ok(()),
        }
    }
}
