#include <yaml-cpp/yaml.h>

#include "agone/prompt_engine.hpp"

namespace agone::prompt {

namespace {

const std::map<std::string, int>& default_limit_table() {
  // context windows for the models named in configs we ship; everything else
  // gets the conservative 8192 default
  static const std::map<std::string, int> table = {
      {"gpt-4o-mini", 128000},
      {"gpt-4o", 128000},
      {"gemini-1.5-pro", 2000000},
      {"llama3.1", 128000},
  };
  return table;
}

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw SchemaViolation(path + ": " + what);
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) violation(path, "expected a mapping");
}

void require_sequence(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) violation(path, "expected a sequence");
}

}  // namespace

int ExperimentConfig::token_limit_for(const std::string& model) const {
  auto it = token_limits.find(model);
  if (it != token_limits.end()) return it->second;
  for (const auto& [prefix, limit] : default_limit_table()) {
    if (model.rfind(prefix, 0) == 0) return limit;
  }
  return 8192;
}

const PromptTemplate* ExperimentConfig::find_prompt(const std::string& name) const {
  for (const auto& p : prompts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

ExperimentConfig load_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw SchemaViolation(std::string("not well-formed YAML: ") + e.what());
  }
  require_map(root, "$");

  ExperimentConfig config;
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    if (key == "llms") {
      require_sequence(entry.second, "llms");
      int i = 0;
      for (const auto& llm : entry.second) {
        const std::string path = "llms[" + std::to_string(i++) + "]";
        require_map(llm, path);
        ModelSpec spec;
        for (const auto& field : llm) {
          const std::string name = field.first.as<std::string>();
          if (name == "model") {
            spec.model = field.second.as<std::string>();
          } else if (name == "temperature") {
            spec.temperature = field.second.as<double>();
          } else {
            violation(path + "." + name, "unknown key");
          }
        }
        if (spec.model.empty()) violation(path + ".model", "missing or empty");
        if (spec.temperature < 0.0 || spec.temperature > 2.0) {
          throw TemperatureOutOfRange(path + ".temperature: " +
                                      std::to_string(spec.temperature) +
                                      " is outside [0, 2]");
        }
        config.llms.push_back(std::move(spec));
      }
    } else if (key == "prompts") {
      require_sequence(entry.second, "prompts");
      int i = 0;
      for (const auto& prompt : entry.second) {
        const std::string path = "prompts[" + std::to_string(i++) + "]";
        require_map(prompt, path);
        PromptTemplate tmpl;
        for (const auto& field : prompt) {
          const std::string name = field.first.as<std::string>();
          if (name == "name") {
            tmpl.name = field.second.as<std::string>();
          } else if (name == "value") {
            require_sequence(field.second, path + ".value");
            int j = 0;
            for (const auto& message : field.second) {
              const std::string mpath = path + ".value[" + std::to_string(j++) + "]";
              require_map(message, mpath);
              PromptMessage msg;
              for (const auto& mfield : message) {
                const std::string mname = mfield.first.as<std::string>();
                if (mname == "role") {
                  msg.role = mfield.second.as<std::string>();
                } else if (mname == "content") {
                  msg.content = mfield.second.as<std::string>();
                } else {
                  violation(mpath + "." + mname, "unknown key");
                }
              }
              if (msg.role != "system" && msg.role != "user") {
                violation(mpath + ".role", "role must be system or user, got '" + msg.role + "'");
              }
              tmpl.messages.push_back(std::move(msg));
            }
          } else {
            violation(path + "." + name, "unknown key");
          }
        }
        if (tmpl.name.empty()) violation(path + ".name", "missing or empty");
        for (const auto& existing : config.prompts) {
          if (existing.name == tmpl.name) violation(path + ".name", "duplicate prompt name");
        }
        config.prompts.push_back(std::move(tmpl));
      }
    } else if (key == "token_limits") {
      require_map(entry.second, "token_limits");
      for (const auto& limit : entry.second) {
        int value = limit.second.as<int>();
        if (value <= 0) violation("token_limits." + limit.first.as<std::string>(),
                                  "limit must be positive");
        config.token_limits[limit.first.as<std::string>()] = value;
      }
    } else if (key == "aggregation_policy") {
      try {
        config.aggregation_policy =
            metrics::policy_from_string(entry.second.as<std::string>());
      } catch (const Error& e) {
        violation("aggregation_policy", e.what());
      }
    } else if (key == "exemplar") {
      require_map(entry.second, "exemplar");
      ExemplarPair pair;
      for (const auto& field : entry.second) {
        const std::string name = field.first.as<std::string>();
        if (name == "class_under_test") {
          pair.class_under_test = field.second.as<std::string>();
        } else if (name == "test_class") {
          pair.test_class = field.second.as<std::string>();
        } else if (name == "testing_framework") {
          pair.testing_framework = field.second.as<std::string>();
        } else if (name == "java_version") {
          pair.java_version = field.second.as<std::string>();
        } else {
          violation("exemplar." + name, "unknown key");
        }
      }
      config.exemplar = std::move(pair);
    } else {
      violation(key, "unknown top-level key");
    }
  }
  return config;
}

}  // namespace agone::prompt
