#pragma once

#include <stdexcept>
#include <string>

namespace stylelab {

// Configuration / usage problems: bad flags, role/prompt mismatches,
// unknown config keys. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data / file-format problems: bad PPM, corrupt checkpoints, missing
// manifests. CLI exit code 3.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures: non-finite losses, divergent training. CLI exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-vocabulary word in a prompt; what() names the word.
struct VocabError : std::invalid_argument {
    explicit VocabError(const std::string& word)
        : std::invalid_argument("word not in vocabulary: '" + word + "'"), word(word) {}
    std::string word;
};

}  // namespace stylelab
