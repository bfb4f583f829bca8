#pragma once

#include <stdexcept>
#include <string>

namespace freeway {

// Base class for all project errors so callers can catch one type at the CLI
// boundary and report a single machine-parsable line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Rejected input: dimension mismatch, out-of-range argument, etc.
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& m) : Error("invalid-input", m) {}
};

// A plain network was passed where a dueling one was required (or vice
// versa), or a parameter file does not match the configured architecture.
struct ArchitectureMismatch : Error {
  explicit ArchitectureMismatch(const std::string& m) : Error("architecture-mismatch", m) {}
};

// Non-finite loss or network output during training.
struct TrainingDiverged : Error {
  explicit TrainingDiverged(const std::string& m) : Error("training-diverged", m) {}
};

// Stepping an episode that already terminated.
struct EpisodeFinished : Error {
  explicit EpisodeFinished(const std::string& m) : Error("episode-finished", m) {}
};

// The road cannot hold the requested number of vehicles at the spawn gap.
struct SpawnCapacity : Error {
  explicit SpawnCapacity(const std::string& m) : Error("spawn-capacity", m) {}
};

// Config file problems, with file/line context in the message.
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config-error", m) {}
};

// Parameter file problems: bad version, malformed line, truncated file.
struct ParamsFormatError : Error {
  explicit ParamsFormatError(const std::string& m) : Error("params-format", m) {}
};

}  // namespace freeway
