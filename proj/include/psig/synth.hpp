#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psig/common.hpp"
#include "psig/csv.hpp"

namespace psig::synth {

struct Params {
  std::size_t entities = 1000;
  std::size_t records_per_entity = 3;
  double corruption = 0.2;  // per-attribute probability of one corruption
  std::uint64_t seed = 42;
  bool two_source = false;  // alternate an entity's records between A and B
};

struct Row {
  std::string id;
  std::string name;
  std::string address;
  std::string phone;
  std::size_t entity = 0;
  bool in_b = false;
};

namespace pools {

inline constexpr std::array<std::string_view, 96> kFirst = {
    "james",   "mary",    "john",    "patricia", "robert",  "jennifer", "michael", "linda",    "william", "elizabeth",
    "david",   "barbara", "richard", "susan",    "joseph",  "jessica",  "thomas",  "sarah",    "charles", "karen",
    "daniel",  "nancy",   "matthew", "lisa",     "anthony", "betty",    "mark",    "margaret", "donald",  "sandra",
    "steven",  "ashley",  "paul",    "kimberly", "andrew",  "emily",    "joshua",  "donna",    "kenneth", "michelle",
    "kevin",   "carol",   "brian",   "amanda",   "george",  "melissa",  "timothy", "deborah",  "ronald",  "stephanie",
    "edward",  "rebecca", "jason",   "sharon",   "jeffrey", "laura",    "ryan",    "cynthia",  "jacob",   "kathleen",
    "gary",    "amy",     "nicholas", "angela",  "eric",    "shirley",  "jonathan", "anna",    "stephen", "brenda",
    "larry",   "pamela",  "justin",  "emma",     "scott",   "nicole",   "brandon", "helen",    "benjamin", "samantha",
    "samuel",  "katherine", "gregory", "christine", "alexander", "debra", "frank",  "rachel",   "patrick", "carolyn",
    "raymond", "janet",   "jack",    "catherine", "dennis", "maria"};

inline constexpr std::array<std::string_view, 120> kLast = {
    "smith",    "johnson",  "williams", "brown",     "jones",    "garcia",   "miller",   "davis",     "rodriguez",
    "martinez", "hernandez", "lopez",   "gonzalez",  "wilson",   "anderson", "thomas",   "taylor",    "moore",
    "jackson",  "martin",   "lee",      "perez",     "thompson", "white",    "harris",   "sanchez",   "clark",
    "ramirez",  "lewis",    "robinson", "walker",    "young",    "allen",    "king",     "wright",    "scott",
    "torres",   "nguyen",   "hill",     "flores",    "green",    "adams",    "nelson",   "baker",     "hall",
    "rivera",   "campbell", "mitchell", "carter",    "roberts",  "gomez",    "phillips", "evans",     "turner",
    "diaz",     "parker",   "cruz",     "edwards",   "collins",  "reyes",    "stewart",  "morris",    "morales",
    "murphy",   "cook",     "rogers",   "gutierrez", "ortiz",    "morgan",   "cooper",   "peterson",  "bailey",
    "reed",     "kelly",    "howard",   "ramos",     "kim",      "cox",      "ward",     "richardson", "watson",
    "brooks",   "chavez",   "wood",     "james",     "bennett",  "gray",     "mendoza",  "ruiz",      "hughes",
    "price",    "alvarez",  "castillo", "sanders",   "patel",    "myers",    "long",     "ross",      "foster",
    "jimenez",  "powell",   "jenkins",  "perry",     "russell",  "sullivan", "bell",     "coleman",   "butler",
    "henderson", "barnes",  "gonzales", "fisher",    "vasquez",  "simmons",  "romero",   "jordan",    "patterson",
    "alexander", "hamilton", "graham"};

inline constexpr std::array<std::string_view, 64> kStreet = {
    "elizabeth", "victoria", "george",   "king",     "queen",   "william",  "albert",    "church",
    "park",      "station",  "railway",  "high",     "main",    "bridge",   "river",     "hill",
    "forest",    "lake",     "ocean",    "north",    "south",   "east",     "west",      "mill",
    "market",    "school",   "college",  "garden",   "spring",  "valley",   "wattle",    "banksia",
    "acacia",    "eucalypt", "waratah",  "boronia",  "grevillea", "jacaranda", "bottlebrush", "kurrajong",
    "murray",    "darling",  "hunter",   "macquarie", "flinders", "sturt",  "hume",      "oxley",
    "cook",      "phillip",  "bligh",    "hindmarsh", "kent",    "pitt",    "bourke",    "collins",
    "swanston",  "lonsdale", "spencer",  "exhibition", "russell", "flemington", "chapel", "commercial"};

inline constexpr std::array<std::string_view, 8> kStreetType = {"street", "road",  "avenue", "lane",
                                                                "place",  "drive", "court",  "parade"};
inline constexpr std::array<std::string_view, 8> kStreetAbbrev = {"st", "rd", "ave", "ln", "pl", "dr", "ct", "pde"};

inline constexpr std::array<std::string_view, 48> kSuburb = {
    "canberra",  "bungendore", "queanbeyan", "goulburn",  "yass",      "braidwood", "cooma",      "jindabyne",
    "tumut",     "gundagai",   "wagga",      "albury",    "orange",    "bathurst",  "dubbo",      "parkes",
    "forbes",    "cowra",      "young",      "harden",    "crookwell", "moss vale", "bowral",     "mittagong",
    "nowra",     "ulladulla",  "batemans",   "moruya",    "narooma",   "bega",      "eden",       "merimbula",
    "bombala",   "delegate",   "tathra",     "cobargo",   "bermagui",  "tilba",     "kiama",      "gerringong",
    "berry",     "wollongong", "dapto",      "camden",    "picton",    "campbelltown", "liverpool", "penrith"};

}  // namespace pools

namespace detail {

template <typename Pool>
std::string pick(std::mt19937_64& rng, const Pool& pool) {
  return std::string(pool[rng() % pool.size()]);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::string join_words(const std::vector<std::string>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(' ');
    out += w[i];
  }
  return out;
}

// One of: a letter typo, swapping two adjacent words, dropping a word.
inline std::string corrupt(std::mt19937_64& rng, const std::string& value) {
  auto words = split_words(value);
  if (words.empty()) return value;
  const auto op = rng() % 3;
  if (op == 0 || words.size() < 2) {
    auto& w = words[rng() % words.size()];
    const auto pos = rng() % w.size();
    const char c = static_cast<char>(std::isdigit(static_cast<unsigned char>(w[pos])) ? '0' + rng() % 10
                                                                                       : 'a' + rng() % 26);
    w[pos] = c;
  } else if (op == 1) {
    const auto i = rng() % (words.size() - 1);
    std::swap(words[i], words[i + 1]);
  } else {
    words.erase(words.begin() + static_cast<std::ptrdiff_t>(rng() % words.size()));
  }
  return join_words(words);
}

}  // namespace detail

// Person-like records (name, address, phone) with controlled corruption.
// Fully determined by the parameters.
inline std::vector<Row> generate(const Params& p) {
  if (p.entities == 0 || p.records_per_entity == 0) throw ConfigError("synth: counts must be positive");
  if (!(p.corruption >= 0.0 && p.corruption <= 1.0)) throw ConfigError("synth: corruption rate must lie in [0, 1]");
  std::mt19937_64 rng(p.seed);
  auto chance = [&](double prob) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < prob; };

  std::vector<Row> rows;
  rows.reserve(p.entities * p.records_per_entity);
  std::size_t next_a = 0, next_b = 0;
  for (std::size_t e = 0; e < p.entities; ++e) {
    std::string name = detail::pick(rng, pools::kFirst);
    if (rng() % 2) name += " " + detail::pick(rng, pools::kFirst);
    name += " " + detail::pick(rng, pools::kLast);
    const auto type = rng() % pools::kStreetType.size();
    const std::string number = std::to_string(1 + rng() % 400);
    const std::string street = detail::pick(rng, pools::kStreet);
    const std::string suburb = detail::pick(rng, pools::kSuburb);
    std::string phone = "0" + std::to_string(2 + rng() % 8);
    for (int i = 0; i < 8; ++i) phone.push_back(static_cast<char>('0' + rng() % 10));

    for (std::size_t r = 0; r < p.records_per_entity; ++r) {
      Row row;
      row.entity = e;
      row.in_b = p.two_source && (r % 2 == 1);
      row.id = std::to_string(row.in_b ? next_b++ : next_a++);
      row.name = name;
      row.address = number + " " + street + " " + std::string(pools::kStreetType[type]) + " " + suburb;
      row.phone = phone;
      if (chance(p.corruption)) row.name = detail::corrupt(rng, row.name);
      if (chance(p.corruption)) {
        // Abbreviating the street type is a format change, not a typo.
        if (rng() % 4 == 0)
          row.address = number + " " + street + " " + std::string(pools::kStreetAbbrev[type]) + " " + suburb;
        else
          row.address = detail::corrupt(rng, row.address);
      }
      if (chance(p.corruption)) {
        if (rng() % 4 == 0)
          row.phone = "(" + phone.substr(0, 2) + ") " + phone.substr(2, 4) + " " + phone.substr(6);
        else if (rng() % 3 == 0)
          row.phone.clear();
        else
          row.phone = detail::corrupt(rng, row.phone);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

struct Files {
  std::vector<std::filesystem::path> written;
};

// Writes records (records.csv, or a.csv/b.csv), truth.csv and a runnable
// config.json into `dir`.
inline Files write(const std::vector<Row>& rows, const Params& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Files files;
  auto open = [&](const std::string& name) {
    files.written.push_back(dir / name);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    return out;
  };
  auto header = [](std::ofstream& out) { out << "id,name,address,phone\n"; };
  auto emit = [](std::ofstream& out, const Row& r) {
    out << r.id << ',' << csv::escape(r.name) << ',' << csv::escape(r.address) << ',' << csv::escape(r.phone)
        << '\n';
  };
  if (p.two_source) {
    auto a = open("a.csv");
    auto b = open("b.csv");
    header(a);
    header(b);
    for (const auto& r : rows) emit(r.in_b ? b : a, r);
  } else {
    auto out = open("records.csv");
    header(out);
    for (const auto& r : rows) emit(out, r);
  }

  {
    auto truth = open("truth.csv");
    truth << "id_a,id_b\n";
    for (std::size_t i = 0; i < rows.size();) {
      std::size_t j = i;
      while (j < rows.size() && rows[j].entity == rows[i].entity) ++j;
      for (std::size_t x = i; x < j; ++x)
        for (std::size_t y = x + 1; y < j; ++y) {
          if (p.two_source) {
            if (rows[x].in_b == rows[y].in_b) continue;
            const auto& ra = rows[x].in_b ? rows[y] : rows[x];
            const auto& rb = rows[x].in_b ? rows[x] : rows[y];
            truth << ra.id << ',' << rb.id << '\n';
          } else {
            truth << rows[x].id << ',' << rows[y].id << '\n';
          }
        }
      i = j;
    }
  }

  nlohmann::ordered_json cfg;
  cfg["schema"] = {"name", "address", "phone"};
  if (p.two_source) {
    cfg["sources"] = {{{"tag", "A"}, {"path", "a.csv"}, {"key_column", "id"}},
                      {{"tag", "B"}, {"path", "b.csv"}, {"key_column", "id"}}};
  } else {
    cfg["sources"] = {{{"tag", "single"}, {"path", "records.csv"}, {"key_column", "id"}}};
  }
  using J = nlohmann::ordered_json;
  cfg["templates"] = J::array({
      J{{"id", 1}, {"parts", J::array({J{{"kind", "random"}, {"attr", "name"}, {"k", 2}},
                                       J{{"kind", "consecutive"}, {"attr", "address"}, {"n", 2}}})}},
      J{{"id", 2}, {"parts", J::array({J{{"kind", "random"}, {"attr", "name"}, {"k", 2}},
                                       J{{"kind", "last_digits"}, {"attr", "phone"}, {"d", 6}}})}},
      J{{"id", 3}, {"parts", J::array({J{{"kind", "consecutive"}, {"attr", "address"}, {"n", 2}},
                                       J{{"kind", "last_digits"}, {"attr", "phone"}, {"d", 6}}})}},
  });
  cfg["model"] = {{"a", 3.0}, {"b", 0.05}};
  cfg["link"] = {{"rho", 0.3}, {"tau", 0.6}, {"verifier", "none"}};
  cfg["truth"] = {{"path", "truth.csv"}, {"columns", {"id_a", "id_b"}}};
  cfg["grid"] = {{"a", {2.0, 3.0, 5.0}}, {"b", {0.01, 0.05, 0.2}}, {"rho", {0.2, 0.4}}, {"tau", {0.3, 0.5, 0.7, 0.9}}};
  auto out = open("config.json");
  out << cfg.dump(2) << '\n';
  return files;
}

}  // namespace psig::synth
