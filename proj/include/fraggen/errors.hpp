#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fraggen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// estree-core
class UnsupportedKind : public Error {
 public:
  explicit UnsupportedKind(std::string kind)
      : Error("unsupported node kind: " + kind), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class MalformedAst : public Error {
 public:
  MalformedAst(std::string path, const std::string& what)
      : Error("malformed AST at " + path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IncompleteAst : public Error {
 public:
  IncompleteAst() : Error("AST still contains unexpanded stubs") {}
};

// fragmenter
class ReassemblyTypeError : public Error {
 public:
  explicit ReassemblyTypeError(std::size_t position)
      : Error("fragment kind does not match stub at sequence position " +
              std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class ReassemblyArityError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

// nnlm
class InvalidHyperparams : public Error {
 public:
  using Error::Error;
};

class VocabRangeError : public Error {
 public:
  using Error::Error;
};

class ReservedTarget : public Error {
 public:
  using Error::Error;
};

class DivergedError : public Error {
 public:
  explicit DivergedError(std::size_t batch)
      : Error("non-finite value during training at batch " + std::to_string(batch)),
        batch_(batch) {}
  std::size_t batch() const { return batch_; }

 private:
  std::size_t batch_;
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset has no prediction steps") {}
};

class VocabMismatch : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

// generator
class NothingToRemove : public Error {
 public:
  NothingToRemove() : Error("AST has no removable subtree") {}
};

class AppendTypeError : public Error {
 public:
  using Error::Error;
};

class NothingToAppend : public Error {
 public:
  NothingToAppend() : Error("AST has no stub to expand") {}
};

// harness
class EngineUnavailable : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// parser adapter client
class AdapterError : public Error {
 public:
  using Error::Error;
};

}  // namespace fraggen
