#include "mlpit/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "mlpit/error.hpp"

namespace mlpit {

namespace fs = std::filesystem;

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error(ErrorCode::io, "cannot format number");
    return std::string(buf, end);
}

double parse_number(std::string_view text, std::size_t row) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": '" + std::string(text) +
                                          "' is not a number",
                    row);
    }
    return value;
}

namespace {

std::uint64_t parse_index(std::string_view text, std::size_t row) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::parse,
                    "row " + std::to_string(row) + ": '" + std::string(text) +
                        "' is not a non-negative integer",
                    row);
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    return out;
}

// Calls row_fn(fields, row_number) for each data row after checking the header.
template <typename RowFn>
void read_csv(const fs::path& path, std::string_view header, RowFn row_fn) {
    auto in = open_in(path);
    std::string line;
    std::size_t row = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!seen_header) {
            if (line != header) {
                throw Error(ErrorCode::parse,
                            path.filename().string() + " row " + std::to_string(row) +
                                ": expected header '" + std::string(header) + "'",
                            row);
            }
            seen_header = true;
            continue;
        }
        row_fn(split(line), row);
    }
    if (!seen_header) {
        throw Error(ErrorCode::empty_input, path.filename().string() + " is empty");
    }
}

void expect_fields(const std::vector<std::string_view>& fields, std::size_t n, std::size_t row) {
    if (fields.size() != n) {
        throw Error(ErrorCode::parse,
                    "row " + std::to_string(row) + ": expected " + std::to_string(n) +
                        " fields, got " + std::to_string(fields.size()),
                    row);
    }
}

}  // namespace

void ObservationSeries::validate() const {
    if (times.size() != values.size()) {
        throw Error(ErrorCode::structure, "observation times and values differ in length");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw Error(ErrorCode::structure, "observation times must be strictly increasing");
        }
    }
}

void write_hierarchy_header(std::ostream& os) {
    os << "level,sample_index,time,fine_value,coarse_value\n";
}

void write_hierarchy_rows(std::ostream& os, double time, const Hierarchy& h) {
    const std::string t = format_number(time);
    for (std::size_t i = 0; i < h.level0.size(); ++i) {
        os << "0," << i << ',' << t << ',' << format_number(h.level0[i]) << ",\n";
    }
    for (std::size_t l = 0; l < h.pairs.size(); ++l) {
        const auto& pair = h.pairs[l];
        for (std::size_t i = 0; i < pair.size(); ++i) {
            os << (l + 1) << ',' << i << ',' << t << ',' << format_number(pair.fine[i]) << ','
               << format_number(pair.coarse[i]) << '\n';
        }
    }
}

std::vector<TimedHierarchy> read_hierarchy_csv(const fs::path& path) {
    struct Sample {
        std::uint64_t index;
        double fine;
        std::optional<double> coarse;
        std::size_t row;
    };
    using Levels = std::map<std::uint64_t, std::vector<Sample>>;
    std::vector<std::pair<double, Levels>> snapshots;
    std::map<double, std::size_t> by_time;

    read_csv(path, "level,sample_index,time,fine_value,coarse_value",
             [&](const std::vector<std::string_view>& f, std::size_t row) {
                 expect_fields(f, 5, row);
                 const auto level = parse_index(f[0], row);
                 const auto index = parse_index(f[1], row);
                 const double time = parse_number(f[2], row);
                 const double fine = parse_number(f[3], row);
                 std::optional<double> coarse;
                 if (!f[4].empty()) coarse = parse_number(f[4], row);
                 auto [it, inserted] = by_time.try_emplace(time, snapshots.size());
                 if (inserted) snapshots.emplace_back(time, Levels{});
                 snapshots[it->second].second[level].push_back({index, fine, coarse, row});
             });

    std::vector<TimedHierarchy> out;
    out.reserve(snapshots.size());
    for (auto& [time, levels] : snapshots) {
        TimedHierarchy th{time, {}};
        std::uint64_t expected_level = 0;
        for (auto& [level, samples] : levels) {
            if (level != expected_level) {
                throw Error(ErrorCode::structure, "time " + format_number(time) + ": level " +
                                                      std::to_string(expected_level) + " missing");
            }
            ++expected_level;
            std::vector<const Sample*> slot(samples.size(), nullptr);
            for (const auto& s : samples) {
                if (s.index >= samples.size() || slot[s.index]) {
                    throw Error(ErrorCode::structure,
                                "row " + std::to_string(s.row) + ": sample index " +
                                    std::to_string(s.index) + " duplicated or out of range",
                                s.row);
                }
                slot[s.index] = &s;
            }
            if (level == 0) {
                for (const Sample* s : slot) {
                    if (s->coarse) {
                        throw Error(ErrorCode::structure,
                                    "row " + std::to_string(s->row) +
                                        ": level-0 rows carry no coarse value",
                                    s->row);
                    }
                    th.hierarchy.level0.push_back(s->fine);
                }
            } else {
                LevelPairEnsemble pair;
                for (const Sample* s : slot) {
                    pair.fine.push_back(s->fine);
                    if (s->coarse) pair.coarse.push_back(*s->coarse);
                }
                th.hierarchy.pairs.push_back(std::move(pair));
            }
        }
        th.hierarchy.validate();
        out.push_back(std::move(th));
    }
    if (out.empty()) throw Error(ErrorCode::empty_input, path.filename().string() + " has no rows");
    return out;
}

void write_observations_csv(const fs::path& path, const ObservationSeries& obs) {
    auto out = open_out(path);
    out << "time,value\n";
    for (std::size_t k = 0; k < obs.size(); ++k) {
        out << format_number(obs.times[k]) << ',' << format_number(obs.values[k]) << '\n';
    }
}

ObservationSeries read_observations_csv(const fs::path& path) {
    ObservationSeries obs;
    read_csv(path, "time,value", [&](const std::vector<std::string_view>& f, std::size_t row) {
        expect_fields(f, 2, row);
        obs.times.push_back(parse_number(f[0], row));
        obs.values.push_back(parse_number(f[1], row));
    });
    if (obs.size() == 0) throw Error(ErrorCode::empty_input, "observation file has no rows");
    obs.validate();
    return obs;
}

void write_histogram_csv(const fs::path& path, const PitHistogram& hist) {
    auto out = open_out(path);
    out << "bin_lower,bin_upper,count\n";
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        out << format_number(hist.bin_lower(i)) << ',' << format_number(hist.bin_upper(i)) << ','
            << hist.counts[i] << '\n';
    }
}

std::vector<std::size_t> read_histogram_csv(const fs::path& path) {
    std::vector<std::size_t> counts;
    read_csv(path, "bin_lower,bin_upper,count",
             [&](const std::vector<std::string_view>& f, std::size_t row) {
                 expect_fields(f, 3, row);
                 parse_number(f[0], row);
                 parse_number(f[1], row);
                 counts.push_back(parse_index(f[2], row));
             });
    if (counts.empty()) throw Error(ErrorCode::empty_input, "histogram file has no rows");
    return counts;
}

void write_forecast_csv(const fs::path& path, const ForecastEnsemble& fe) {
    auto out = open_out(path);
    out << "index,u,value\n";
    for (std::size_t i = 0; i < fe.values.size(); ++i) {
        out << (i + 1) << ',' << format_number(fe.u[i]) << ',' << format_number(fe.values[i])
            << '\n';
    }
}

void write_reference_csv(const fs::path& path, const ReferenceDensity& ref) {
    auto out = open_out(path);
    out << "r,density\n";
    for (std::size_t j = 0; j < ref.r.size(); ++j) {
        out << format_number(ref.r[j]) << ',' << format_number(ref.density[j]) << '\n';
    }
}

std::string sha256_file(const fs::path& path) {
    auto in = open_in(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::io, "SHA-256 unavailable");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace mlpit
