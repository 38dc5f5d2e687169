#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mlpit/error.hpp"
#include "mlpit/io.hpp"

using namespace mlpit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mlpit_io_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& f) const { return path / f; }
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an mlpit::Error");
    return ErrorCode::io;
}

}  // namespace

TEST_CASE("number formatting round trips bit for bit") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> z(0.0, 1e3);
    for (int i = 0; i < 10'000; ++i) {
        const double x = z(gen) * std::exp(z(gen) / 200.0);
        CHECK(parse_number(format_number(x), 1) == x);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(0.03125) == "0.03125");

    try {
        parse_number("1.5x", 7);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        REQUIRE(e.row());
        CHECK(*e.row() == 7);
    }
    CHECK(code_of([] { parse_number("", 1); }) == ErrorCode::parse);
    CHECK(code_of([] { parse_number(" 1", 1); }) == ErrorCode::parse);
}

TEST_CASE("hierarchy csv round trip") {
    TempDir dir("hier");
    Hierarchy a;
    a.level0 = {0.1, -0.25, 1.0 / 3.0};
    a.pairs = {{{1.0, 2.0}, {1.5, 2.5}}, {{0.7}, {0.6}}};
    Hierarchy b;
    b.level0 = {5.0};
    b.pairs = {{{6.0}, {7.0}}, {{8.0}, {9.0}}};
    {
        std::ofstream out(dir / "h.csv", std::ios::binary);
        write_hierarchy_header(out);
        write_hierarchy_rows(out, 1.0, a);
        write_hierarchy_rows(out, 2.0, b);
    }
    const auto text = read_text(dir / "h.csv");
    CHECK(text.rfind("level,sample_index,time,fine_value,coarse_value\n0,0,1,0.1,\n", 0) == 0);

    const auto snaps = read_hierarchy_csv(dir / "h.csv");
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].time == 1.0);
    CHECK(snaps[0].hierarchy.level0 == a.level0);
    CHECK(snaps[0].hierarchy.pairs[0].fine == a.pairs[0].fine);
    CHECK(snaps[0].hierarchy.pairs[0].coarse == a.pairs[0].coarse);
    CHECK(snaps[0].hierarchy.pairs[1].coarse == a.pairs[1].coarse);
    CHECK(snaps[1].hierarchy.sizes() == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("hierarchy csv rows may arrive in any order") {
    TempDir dir("shuffled");
    write_text(dir / "h.csv",
               "level,sample_index,time,fine_value,coarse_value\n"
               "1,1,0.5,4,3\n"
               "0,1,0.5,2,\n"
               "1,0,0.5,1,0\n"
               "0,0,0.5,1,\n");
    const auto snaps = read_hierarchy_csv(dir / "h.csv");
    REQUIRE(snaps.size() == 1);
    CHECK(snaps[0].hierarchy.level0 == std::vector<double>{1.0, 2.0});
    CHECK(snaps[0].hierarchy.pairs[0].fine == std::vector<double>{1.0, 4.0});
}

TEST_CASE("hierarchy csv errors") {
    TempDir dir("bad");
    const std::string header = "level,sample_index,time,fine_value,coarse_value\n";

    write_text(dir / "empty.csv", "");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "empty.csv"); }) == ErrorCode::empty_input);

    write_text(dir / "header_only.csv", header);
    CHECK(code_of([&] { read_hierarchy_csv(dir / "header_only.csv"); }) == ErrorCode::empty_input);

    write_text(dir / "bad_header.csv", "a,b\n0,0\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "bad_header.csv"); }) == ErrorCode::parse);

    write_text(dir / "nan.csv", header + "0,0,1,oops,\n");
    try {
        read_hierarchy_csv(dir / "nan.csv");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        REQUIRE(e.row());
        CHECK(*e.row() == 2);
    }

    write_text(dir / "short.csv", header + "0,0,1\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "short.csv"); }) == ErrorCode::parse);

    write_text(dir / "missing_coarse.csv", header + "0,0,1,1,\n1,0,1,1,\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "missing_coarse.csv"); }) == ErrorCode::structure);

    write_text(dir / "gap.csv", header + "0,0,1,1,\n2,0,1,1,1\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "gap.csv"); }) == ErrorCode::structure);

    write_text(dir / "dup.csv", header + "0,0,1,1,\n0,0,1,2,\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "dup.csv"); }) == ErrorCode::structure);

    write_text(dir / "coarse_on_zero.csv", header + "0,0,1,1,2\n");
    CHECK(code_of([&] { read_hierarchy_csv(dir / "coarse_on_zero.csv"); }) == ErrorCode::structure);

    CHECK(code_of([&] { read_hierarchy_csv(dir / "absent.csv"); }) == ErrorCode::io);
}

TEST_CASE("observations csv") {
    TempDir dir("obs");
    ObservationSeries obs{{1.0, 2.0, 3.0}, {0.1, -0.2, 0.3}};
    write_observations_csv(dir / "o.csv", obs);
    CHECK(read_text(dir / "o.csv") == "time,value\n1,0.1\n2,-0.2\n3,0.3\n");
    const auto back = read_observations_csv(dir / "o.csv");
    CHECK(back.times == obs.times);
    CHECK(back.values == obs.values);

    write_text(dir / "crlf.csv", "time,value\r\n1,2\r\n");
    CHECK(read_observations_csv(dir / "crlf.csv").values == std::vector<double>{2.0});

    write_text(dir / "empty.csv", "");
    CHECK(code_of([&] { read_observations_csv(dir / "empty.csv"); }) == ErrorCode::empty_input);
    write_text(dir / "header.csv", "time,value\n");
    CHECK(code_of([&] { read_observations_csv(dir / "header.csv"); }) == ErrorCode::empty_input);
    write_text(dir / "order.csv", "time,value\n2,0\n1,0\n");
    CHECK(code_of([&] { read_observations_csv(dir / "order.csv"); }) == ErrorCode::structure);
}

TEST_CASE("histogram and forecast csv") {
    TempDir dir("hist");
    PitHistogram h;
    h.counts = {3, 0, 7, 1};
    write_histogram_csv(dir / "h.csv", h);
    CHECK(read_text(dir / "h.csv") ==
          "bin_lower,bin_upper,count\n0,0.25,3\n0.25,0.5,0\n0.5,0.75,7\n0.75,1,1\n");
    CHECK(read_histogram_csv(dir / "h.csv") == h.counts);

    ForecastEnsemble fe;
    fe.values = {1.5, -2.0};
    fe.u = {0.25, 0.75};
    write_forecast_csv(dir / "f.csv", fe);
    CHECK(read_text(dir / "f.csv") == "index,u,value\n1,0.25,1.5\n2,0.75,-2\n");
}

TEST_CASE("sha256") {
    TempDir dir("sha");
    write_text(dir / "abc", "abc");
    CHECK(sha256_file(dir / "abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    write_text(dir / "empty", "");
    CHECK(sha256_file(dir / "empty") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
