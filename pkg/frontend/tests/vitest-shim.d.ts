/**
 * Loose declarations for the globally installed vitest runner, so the
 * type checker passes without a local node_modules. Assertions are
 * untyped; the runner itself enforces them at execution time.
 */

declare module "vitest" {
  type TestBody = () => void | Promise<void>;
  export function describe(name: string, body: () => void): void;
  export function it(name: string, body: TestBody, timeout?: number): void;
  export function test(name: string, body: TestBody, timeout?: number): void;
  export function beforeAll(body: TestBody, timeout?: number): void;
  export function afterAll(body: TestBody, timeout?: number): void;
  export function beforeEach(body: TestBody, timeout?: number): void;
  export function afterEach(body: TestBody, timeout?: number): void;
  export const expect: any;
}
