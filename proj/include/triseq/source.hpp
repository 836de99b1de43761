#pragma once

// Observation sources: seeded synthetic normal streams and file-backed
// replay. Sources are deterministic; replaying yields the same sequence.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "triseq/rng.hpp"

namespace triseq {

class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pull-based stream of real observations.
class ObservationSource {
public:
    virtual ~ObservationSource() = default;
    /// Next observation, or nullopt when exhausted.
    virtual std::optional<double> next() = 0;
};

/// Infinite i.i.d. N(mu, var) stream, a pure function of
/// (seed, rep_index, mu, var).
class NormalSource final : public ObservationSource {
public:
    NormalSource(std::uint64_t seed, std::uint64_t rep_index, double mu,
                 double var)
        : rng_(seed, rep_index), mu_(mu), sigma_(std::sqrt(var)) {
        if (!(var > 0))
            throw std::domain_error("NormalSource: require var > 0");
    }

    std::optional<double> next() override {
        return mu_ + sigma_ * rng_.next_normal();
    }

private:
    SplitRng rng_;
    double mu_;
    double sigma_;
};

/// Replays a fixed vector of observations.
class VectorSource final : public ObservationSource {
public:
    explicit VectorSource(std::vector<double> data) : data_(std::move(data)) {}

    std::optional<double> next() override {
        if (pos_ >= data_.size())
            return std::nullopt;
        return data_[pos_++];
    }

private:
    std::vector<double> data_;
    std::size_t pos_ = 0;
};

/// Parses a text file with one decimal observation per line. Blank lines
/// are ignored; LF and CRLF both accepted; a parse failure reports the
/// 1-based line number.
inline std::vector<double> read_observation_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open data file: " + path);
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos)
            continue;
        std::size_t consumed = 0;
        double value = 0;
        try {
            value = std::stod(line, &consumed);
        } catch (const std::exception&) {
            throw input_error("parse error at line " + std::to_string(line_no) +
                              ": '" + line + "'");
        }
        if (line.find_first_not_of(" \t", consumed) != std::string::npos)
            throw input_error("parse error at line " + std::to_string(line_no) +
                              ": trailing garbage in '" + line + "'");
        out.push_back(value);
    }
    return out;
}

} // namespace triseq
