//! DSL parser and printer (filled in with the CLI work).
