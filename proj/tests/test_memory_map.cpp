// Memory table extraction, mapping file format, placement and validation.

#include <map>
#include <string>

#include <catch_amalgamated.hpp>

#include "memhls/benchmarks.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/sfg_text.hpp"

using namespace memhls;

namespace {

// The LMS-4 memory table as a designer would fill it in.
constexpr const char* kLms4Table =
    "Name,Class,Implementation,Bank,Address,InitialValue\n"
    "adapt,Variable,Register,-1,-1,0\n"
    "deux_mu,Constant,Memory,0,0,0\n"
    "h(0),LoopBack,Memory,0,1,0\n"
    "h(1),LoopBack,Memory,0,2,0\n"
    "h(2),LoopBack,Memory,0,3,0\n"
    "h(3),LoopBack,Memory,0,4,0\n"
    "x(0),Variable,Memory,0,9,0\n"
    "x(1),Delay,Memory,0,10,0\n"
    "x(2),Delay,Memory,0,11,0\n"
    "x(3),Delay,Memory,0,12,0\n";

template <class Fn>
std::string parse_error_text(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("extract_table on LMS-4 reproduces the designer table classes", "[memory-map][extract]") {
  const auto t = extract_table(gen_lms(4));
  const auto ref = parse_mapping(kLms4Table);
  REQUIRE(t.entries.size() == 10);
  for (const auto& e : ref.entries) {
    const auto* got = t.find(e.name);
    REQUIRE(got);
    CHECK(got->cls == e.cls);
    CHECK(got->implementation == Implementation::Memory);
    CHECK(got->bank == 0);
  }
  for (std::size_t i = 0; i < t.entries.size(); ++i) CHECK(t.entries[i].address == static_cast<int>(i));
}

TEST_CASE("extract_table on a graph without data is empty", "[memory-map][extract]") {
  const auto g = parse_sfg("node a input\nnode m mul\nnode y output\nedge a m\nedge m y\n");
  CHECK(extract_table(g).entries.empty());
}

TEST_CASE("extract_table on FIR-8 gives 16 dense entries in bank 0", "[memory-map][extract]") {
  const auto t = extract_table(gen_fir(8));
  REQUIRE(t.entries.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(t.entries[i].in_memory());
    CHECK(t.entries[i].bank == 0);
    CHECK(t.entries[i].address == static_cast<int>(i));
  }
  CHECK(t.find("h(3)")->cls == DataClass::Constant);
  CHECK(t.find("x(0)")->cls == DataClass::Variable);
  CHECK(t.find("x(5)")->cls == DataClass::Delay);
}

TEST_CASE("mapping rows parse into entries", "[memory-map][parse]") {
  const auto t = parse_mapping(kLms4Table);
  const auto* adapt = t.find("adapt");
  REQUIRE(adapt);
  CHECK(adapt->implementation == Implementation::Register);
  CHECK(adapt->bank == -1);
  CHECK(adapt->address == -1);
  const auto* h0 = t.find("h(0)");
  REQUIRE(h0);
  CHECK(h0->cls == DataClass::LoopBack);
  CHECK(h0->implementation == Implementation::Memory);
  CHECK(h0->bank == 0);
  CHECK(h0->address == 1);
  CHECK(t.bank_count == 1);
  CHECK(t.ports_per_bank == 1);
}

TEST_CASE("mapping parse errors", "[memory-map][parse]") {
  const std::string header = "Name,Class,Implementation,Bank,Address,InitialValue\n";
  CHECK(parse_error_text([&] { (void)parse_mapping(header + "a,Variable,Memory,0,5,0\nb,Variable,Memory,0,5,0\n"); })
            .find("collision") != std::string::npos);
  CHECK(parse_error_text([&] { (void)parse_mapping(header + "a,Variable,Register,0,-1,0\n"); })
            .find("Register row") != std::string::npos);
  CHECK(parse_error_text([&] { (void)parse_mapping(header + "a,Scalar,Memory,0,0,0\n"); }).find("class") !=
        std::string::npos);
  CHECK(parse_error_text([&] { (void)parse_mapping(header + "a,Variable,Rom,0,0,0\n"); }).find("implementation") !=
        std::string::npos);
  CHECK(parse_error_text([&] { (void)parse_mapping("Name,Bank\n"); }).find("header") != std::string::npos);
  CHECK(parse_error_text([&] { (void)parse_mapping(header + "a,Variable,Memory,x,0,0\n"); }).find("line 2") !=
        std::string::npos);
}

TEST_CASE("declared sharing allows a common location", "[memory-map][parse]") {
  const std::string text = "Name,Class,Implementation,Bank,Address,InitialValue\n"
                           "a,Variable,Memory,0,5,0\n"
                           "b,Variable,Memory,0,5,0,shared-with=a\n";
  const auto t = parse_mapping(text);
  CHECK(t.find("b")->shared_with == "a");
}

TEST_CASE("emit/parse round-trip", "[memory-map][roundtrip]") {
  auto t = parse_mapping(kLms4Table);
  CHECK(parse_mapping(emit_mapping(t)) == t);
  auto fft = auto_place(extract_table(gen_fft(16)), {}, 0, 3, 4);
  fft.ports_per_bank = 2;
  fft.entries[0].initial_value = 0.25;
  CHECK(parse_mapping(emit_mapping(fft)) == fft);
  const auto lms = place_arrays(extract_table(gen_lms(8)), {{"h", 0}, {"x", 1}}, 2);
  CHECK(parse_mapping(emit_mapping(lms)) == lms);
  // Canonical text is a fixed point.
  CHECK(emit_mapping(parse_mapping(emit_mapping(lms))) == emit_mapping(lms));
}

TEST_CASE("auto_place: map2_16 on FFT-32", "[memory-map][auto-place]") {
  const auto t = auto_place(extract_table(gen_fft(32)), {}, 0, 2, 16);
  // Declaration order is xr(0..31), xi(0..31): blocks of 16 alternate banks.
  for (int i = 0; i < 16; ++i) {
    CHECK(t.find("xr(" + std::to_string(i) + ")")->bank == 0);
    CHECK(t.find("xi(" + std::to_string(i) + ")")->bank == 0);
    CHECK(t.find("xr(" + std::to_string(i + 16) + ")")->bank == 1);
    CHECK(t.find("xi(" + std::to_string(i + 16) + ")")->bank == 1);
  }
  CHECK(validate_mapping(t, gen_fft(32)).empty());
}

TEST_CASE("auto_place: threshold 0 keeps everything in memory", "[memory-map][auto-place]") {
  const auto g = gen_lms(8);
  const auto life = datum_lifetimes(g, TimingConfig{});
  for (const auto& e : auto_place(extract_table(g), life, 0, 2, 4).entries) CHECK(e.in_memory());
}

TEST_CASE("auto_place: short lifetimes go to registers", "[memory-map][auto-place]") {
  const auto g = gen_lms(8);
  TimingConfig cfg;
  cfg.latency = {1, 1, 1, 1};
  const auto life = datum_lifetimes(g, cfg);
  const int threshold = life.at("adapt") + 1;
  const auto t = auto_place(extract_table(g), life, threshold, 2, 4);
  CHECK(!t.find("adapt")->in_memory());
  for (const auto& e : t.entries) CHECK(e.in_memory() == (life.at(e.name) >= threshold));
}

TEST_CASE("auto_place: 8 data, 2 banks, k = 2", "[memory-map][auto-place]") {
  MemoryTable t;
  for (int i = 0; i < 8; ++i) { MappingEntry e; e.name = "d" + std::to_string(i); t.entries.push_back(e); }
  const auto p = auto_place(t, {}, 0, 2, 2);
  const int expected_bank[] = {0, 0, 1, 1, 0, 0, 1, 1};
  const int expected_addr[] = {0, 1, 0, 1, 2, 3, 2, 3};
  for (int i = 0; i < 8; ++i) {
    CHECK(p.entries[static_cast<std::size_t>(i)].bank == expected_bank[i]);
    CHECK(p.entries[static_cast<std::size_t>(i)].address == expected_addr[i]);
  }
}

TEST_CASE("auto_place: equal split over two banks", "[memory-map][auto-place]") {
  for (int count : {8, 12, 16, 64}) {
    MemoryTable t;
    for (int i = 0; i < count; ++i) { MappingEntry e; e.name = "d" + std::to_string(i); t.entries.push_back(e); }
    for (int k = 1; k <= count; ++k) {
      if (count % k != 0 || (count / k) % 2 != 0) continue;
      const auto p = auto_place(t, {}, 0, 2, k);
      int bank0 = 0;
      for (const auto& e : p.entries) bank0 += e.bank == 0;
      INFO("count " << count << " k " << k);
      CHECK(bank0 == count / 2);
    }
  }
}

TEST_CASE("auto_place is deterministic", "[memory-map][auto-place]") {
  const auto t = extract_table(gen_fft(32));
  CHECK(auto_place(t, {}, 0, 3, 5) == auto_place(t, {}, 0, 3, 5));
  CHECK_THROWS_AS(auto_place(t, {}, 0, 0, 1), Error);
  CHECK_THROWS_AS(auto_place(t, {}, 0, 2, 0), Error);
}

TEST_CASE("validate_mapping", "[memory-map][validate]") {
  const auto g = gen_lms(4);
  CHECK(validate_mapping(parse_mapping(kLms4Table), g).empty());

  SECTION("missing x(2)") {
    auto t = parse_mapping(kLms4Table);
    std::erase_if(t.entries, [](const MappingEntry& e) { return e.name == "x(2)"; });
    const auto d = validate_mapping(t, g);
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == "unmapped");
    CHECK(d[0].message == "unmapped datum x(2)");
  }
  SECTION("bank out of range") {
    auto t = parse_mapping(kLms4Table);
    t.bank_count = 2;
    t.find("h(1)")->bank = 3;
    CHECK(has_code(validate_mapping(t, g), "bank-range"));
  }
  SECTION("collision, sentinel and duplicate") {
    auto t = parse_mapping(kLms4Table);
    t.find("h(1)")->address = 1;
    CHECK(has_code(validate_mapping(t, g), "collision"));
    t = parse_mapping(kLms4Table);
    t.find("adapt")->bank = 0;
    CHECK(has_code(validate_mapping(t, g), "register-sentinel"));
    t = parse_mapping(kLms4Table);
    t.entries.push_back(*t.find("x(0)"));
    t.entries.back().address = 40;
    CHECK(has_code(validate_mapping(t, g), "duplicate-entry"));
  }
}

TEST_CASE("place_arrays: arrays by base name, scalars in registers", "[memory-map]") {
  const auto t = place_arrays(extract_table(gen_lms(4)), {{"h", 0}, {"x", 1}}, 2);
  CHECK(!t.find("adapt")->in_memory());
  CHECK(!t.find("deux_mu")->in_memory());
  for (int i = 0; i < 4; ++i) {
    CHECK(t.find("h(" + std::to_string(i) + ")")->bank == 0);
    CHECK(t.find("h(" + std::to_string(i) + ")")->address == i);
    CHECK(t.find("x(" + std::to_string(i) + ")")->bank == 1);
    CHECK(t.find("x(" + std::to_string(i) + ")")->address == i);
  }
  CHECK_THROWS_AS(place_arrays(extract_table(gen_lms(4)), {{"h", 2}}, 2), Error);
}

TEST_CASE("datum lifetimes follow ASAP", "[memory-map]") {
  TimingConfig cfg;
  cfg.latency = {1, 1, 1, 1};
  const auto life = datum_lifetimes(gen_fir(4), cfg);
  // Every operand exists at iteration start and dies with its product.
  for (int i = 0; i < 4; ++i) CHECK(life.at("h(" + std::to_string(i) + ")") == 1);
}
