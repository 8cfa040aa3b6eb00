//! Minimal JSON writer for the certificate and table sidecars. Output only;
//! cached sidecars are validated by byte comparison, never parsed.

/// Builder for a JSON object. Keys are emitted in insertion order.
pub struct JsonObject {
    parts: Vec<String>,
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.17e}")
    } else {
        // JSON has no infinities; encode as strings.
        format!("\"{x}\"")
    }
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject { parts: Vec::new() }
    }

    pub fn str(mut self, key: &str, value: &str) -> Self {
        self.parts.push(format!("\"{}\": \"{}\"", escape(key), escape(value)));
        self
    }

    pub fn num(mut self, key: &str, value: f64) -> Self {
        self.parts.push(format!("\"{}\": {}", escape(key), number(value)));
        self
    }

    pub fn int(mut self, key: &str, value: i64) -> Self {
        self.parts.push(format!("\"{}\": {}", escape(key), value));
        self
    }

    pub fn bool(mut self, key: &str, value: bool) -> Self {
        self.parts.push(format!("\"{}\": {}", escape(key), value));
        self
    }

    pub fn raw(mut self, key: &str, value: &str) -> Self {
        self.parts.push(format!("\"{}\": {}", escape(key), value));
        self
    }

    pub fn finish(self) -> String {
        format!("{{{}}}", self.parts.join(", "))
    }

    /// Pretty rendering with one key per line at the given indent depth.
    pub fn finish_pretty(self, indent: usize) -> String {
        let pad = "  ".repeat(indent + 1);
        let close = "  ".repeat(indent);
        format!("{{\n{pad}{}\n{close}}}", self.parts.join(&format!(",\n{pad}")))
    }
}

pub fn array(items: impl IntoIterator<Item = String>) -> String {
    format!("[{}]", items.into_iter().collect::<Vec<_>>().join(", "))
}

impl Default for JsonObject {
    fn default() -> Self {
        Self::new()
    }
}
