/** Error types surfaced by the bindings; never a crash. */

/** The core CLI rejected the invocation (exit code 2). */
export class UsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UsageError";
  }
}

/** The core reported a data problem (exit code 1), or inputs were invalid. */
export class DataError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "DataError";
  }
}

/** A buffer does not conform to the binary array format. */
export class FormatError extends Error {
  /** Byte position at which the buffer stopped making sense. */
  readonly offset: number;

  constructor(message: string, offset: number) {
    super(`${message} (byte offset ${offset})`);
    this.name = "FormatError";
    this.offset = offset;
  }
}

/** The core CLI could not be spawned at all. */
export class CoreUnavailableError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CoreUnavailableError";
  }
}
