#pragma once

#include <stdexcept>
#include <string>

namespace ragloop {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or flag value (maps to CLI usage errors).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A caller violated an operation precondition (empty text, empty query, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Document loading / chunking failures.
class IngestError : public Error {
public:
    using Error::Error;
};

/// Vector store failures: dimension mismatch, duplicate ids, persistence.
class StoreError : public Error {
public:
    using Error::Error;
};

/// Provider-side failures (transport, script exhaustion).
class ProviderError : public Error {
public:
    using Error::Error;
};

/// Network / HTTP failure after the transport retry budget is spent.
class TransportError : public ProviderError {
public:
    TransportError(const std::string& msg, int attempts_made)
        : ProviderError(msg), attempts(attempts_made) {}

    int attempts = 0;
};

/// Mock provider had no step matching a request.
class ScriptError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// A stage failed; message carries the iteration / query context.
class StageError : public Error {
public:
    using Error::Error;
};

} // namespace ragloop
