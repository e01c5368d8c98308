#include <set>
#include <unordered_set>

#include "agone/metrics_engine.hpp"

namespace agone::metrics {

namespace {

using java::MethodDecl;
using java::TypeDecl;

// Types that never count as production code when deciding eager/lazy tests.
const std::unordered_set<std::string> kNonProductionTypes = {
    "String",      "Integer",   "Long",        "Double",    "Float",      "Boolean",
    "Character",   "Byte",      "Short",       "Object",    "Math",       "System",
    "Thread",      "Runtime",   "StringBuilder", "StringBuffer", "Arrays", "Collections",
    "Objects",     "Optional",  "List",        "ArrayList", "LinkedList", "Map",
    "HashMap",     "TreeMap",   "Set",         "HashSet",   "TreeSet",    "Iterator",
    "Stream",      "Files",     "Paths",       "Path",      "File",       "FileReader",
    "FileWriter",  "FileInputStream", "FileOutputStream",   "Scanner",    "Random",
    "Date",        "Calendar",  "Assert",      "Assertions", "Assume",    "Mockito",
    "MockitoAnnotations", "Mock", "DriverManager", "TimeUnit", "Exception", "RuntimeException",
    "Throwable",   "Error",     "Class",       "Instant",   "Duration",   "LocalDate",
    "LocalDateTime",
};

bool is_test_method(const MethodDecl& m) {
  if (m.is_constructor || m.is_initializer) return false;
  for (const auto& a : m.annotations) {
    if (a.name == "Test" || a.name == "ParameterizedTest" || a.name == "RepeatedTest" ||
        a.name == "TestTemplate" || a.name == "TestFactory") {
      return true;
    }
  }
  // JUnit 3 convention
  return m.name.rfind("test", 0) == 0 && m.has_body;
}

bool is_setup_method(const MethodDecl& m) {
  for (const auto& a : m.annotations) {
    if (a.name == "Before" || a.name == "BeforeEach" || a.name == "BeforeAll" ||
        a.name == "BeforeClass") {
      return true;
    }
  }
  return m.name == "setUp";
}

bool has_expected_exception_marker(const MethodDecl& m) {
  for (const auto& a : m.annotations) {
    if (a.name == "Test" && a.args_text.find("expected") != std::string::npos) return true;
  }
  return false;
}

// verify() participates as an assertion for unknown-test purposes but not for
// assertion-roulette message accounting.
bool counts_for_roulette(const java::AssertionCall& call) {
  return call.method_name != "verify";
}

void collect_types(const TypeDecl& type, std::vector<const TypeDecl*>& out) {
  out.push_back(&type);
  for (const auto& nested : type.nested) collect_types(nested, out);
}

}  // namespace

SmellCounts zeroed_smells() {
  SmellCounts counts;
  for (const char* code : kSmellCodes) counts[code] = 0;
  return counts;
}

SmellCounts detect_smells(const java::JavaSourceUnit& test_unit) {
  SmellCounts counts = zeroed_smells();

  std::vector<const TypeDecl*> all_types;
  for (const auto& type : test_unit.types) collect_types(type, all_types);

  std::set<std::string> own_names;
  for (const auto* t : all_types) own_names.insert(t->name);

  for (const auto* type : all_types) {
    std::vector<const MethodDecl*> test_methods;
    std::vector<const MethodDecl*> setup_methods;
    for (const auto& m : type->methods) {
      if (is_test_method(m)) test_methods.push_back(&m);
      if (is_setup_method(m)) setup_methods.push_back(&m);
    }

    std::set<std::string> production_types;
    for (const auto& m : type->methods) {
      for (const auto& [t, n] : m.constructed_types) {
        if (!kNonProductionTypes.count(t) && !own_names.count(t)) production_types.insert(t);
      }
      for (const auto& [t, n] : m.mock_targets) {
        if (!kNonProductionTypes.count(t) && !own_names.count(t)) production_types.insert(t);
      }
    }

    // DT: classes named like IDE-generated default tests (per class)
    if (type->name == "ExampleUnitTest" || type->name == "ExampleInstrumentedTest") {
      counts["DT"] += 1;
    }

    // CI: constructors declared in the test class (per constructor)
    for (const auto& m : type->methods) {
      if (m.is_constructor) counts["CI"] += 1;
    }

    // IT: ignore/disabled annotations on the class or its methods (per occurrence)
    for (const auto& a : type->annotations) {
      if (a.name == "Ignore" || a.name == "Disabled") counts["IT"] += 1;
    }
    for (const auto& m : type->methods) {
      for (const auto& a : m.annotations) {
        if (a.name == "Ignore" || a.name == "Disabled") counts["IT"] += 1;
      }
    }

    // production method -> test methods invoking it (LT substrate)
    std::map<std::pair<std::string, std::string>, std::set<std::string>> production_users;

    for (const auto* m : test_methods) {
      // AR: >1 assertion in the method with any lacking a message
      // (per message-less assertion)
      int roulette_eligible = 0;
      for (const auto& call : m->assertions) {
        if (counts_for_roulette(call)) roulette_eligible++;
      }
      if (roulette_eligible > 1) {
        for (const auto& call : m->assertions) {
          if (counts_for_roulette(call) && !call.has_message) counts["AR"] += 1;
        }
      }

      // CTL: control-flow statements inside test methods (per statement)
      counts["CTL"] += m->control_flow_statements;

      // DA: assertion repeated with identical argument text within the method
      // (per duplicate occurrence beyond the first)
      std::map<std::string, int> seen;
      for (const auto& call : m->assertions) {
        std::string key = call.method_name;
        for (const auto& arg : call.args_textual) key += "|" + arg;
        if (++seen[key] > 1) counts["DA"] += 1;
      }

      // EA: test exercising >1 distinct production method of the class under
      // test (per test method)
      std::set<std::pair<std::string, std::string>> distinct_production;
      for (const auto& inv : m->invocations) {
        if (production_types.count(inv.receiver_hint)) {
          distinct_production.insert({inv.receiver_hint, inv.method_name});
          production_users[{inv.receiver_hint, inv.method_name}].insert(m->name);
        }
      }
      if (distinct_production.size() > 1) counts["EA"] += 1;

      // EM: empty test body (per method)
      if (m->has_body && m->body_empty) counts["EM"] += 1;

      // EH: throw statements or try/catch in the test (per method)
      if (m->has_throw || m->has_try) counts["EH"] += 1;

      // MNT: numeric literals passed as assertion arguments (per literal)
      // SE: toString inside assertion arguments (per occurrence)
      for (const auto& call : m->assertions) {
        counts["MNT"] += call.numeric_literal_args;
        counts["SE"] += call.tostring_in_args;
      }

      // MG: external file/database APIs touched in the test (per usage)
      counts["MG"] += m->file_api_uses;

      // RP: standard-output/error prints (per call)
      counts["RP"] += m->print_calls;

      // RA: expected and actual argument texts identical (per assertion)
      for (const auto& call : m->assertions) {
        if (!counts_for_roulette(call)) continue;
        const auto& args = call.args_textual;
        if (args.size() < 2) continue;
        bool first_is_message = call.has_message && !args.front().empty() && args.front()[0] == '"';
        std::size_t expected_idx = first_is_message ? 1 : 0;
        std::size_t actual_idx = expected_idx + 1;
        if (actual_idx < args.size() && args[expected_idx] == args[actual_idx]) {
          counts["RA"] += 1;
        }
      }

      // RO: File objects used without an existence check in the same method
      // (per usage)
      if (!m->has_existence_check) counts["RO"] += m->file_objects;

      // ST: thread sleeps (per call)
      counts["ST"] += m->sleep_calls;

      // UT: no assertion and no expected-exception marker (per method)
      if (m->assertions.empty() && !has_expected_exception_marker(*m)) counts["UT"] += 1;
    }

    // LT: production methods exercised by more than one test method
    // (per production method)
    for (const auto& [method, users] : production_users) {
      if (users.size() > 1) counts["LT"] += 1;
    }

    // GF: setup-initialized fields that at least one test method never uses
    // (per field)
    std::set<std::string> setup_assigned;
    for (const auto* m : setup_methods) {
      for (const auto& name : m->identifiers_assigned) setup_assigned.insert(name);
    }
    for (const auto& field : type->fields) {
      if (!setup_assigned.count(field.name)) continue;
      for (const auto* m : test_methods) {
        if (!m->identifiers_used.count(field.name)) {
          counts["GF"] += 1;
          break;
        }
      }
    }
  }

  return counts;
}

}  // namespace agone::metrics
