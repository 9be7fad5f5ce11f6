export { parseStudyCsv, SchemaError, REQUIRED_COLUMNS } from "./csv";
export type { StudyRow } from "./csv";
export { render, renderBias, renderCoverage, renderVariance } from "./charts";
export { run } from "./cli";
