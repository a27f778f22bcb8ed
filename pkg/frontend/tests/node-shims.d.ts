/**
 * Just enough of the node builtin surface for these tests. The real
 * @types/node package is not a dependency here; the test runner and
 * type checker come from the globally installed toolchain.
 */

declare module "node:fs" {
  export function readFileSync(path: string, encoding: string): string;
}

declare module "node:url" {
  export function fileURLToPath(url: URL | string): string;
}

declare module "node:net" {
  export interface Server {
    address(): { port: number } | string | null;
    close(callback?: () => void): this;
    listen(port: number, host: string, callback?: () => void): this;
    once(event: string, listener: (...args: unknown[]) => void): this;
  }
  export function createServer(): Server;
}

declare module "node:child_process" {
  export interface ChildProcess {
    kill(signal?: string): boolean;
    on(event: string, listener: (...args: unknown[]) => void): this;
    once(event: string, listener: (...args: unknown[]) => void): this;
  }
  export function spawn(
    command: string,
    args: string[],
    options?: { stdio?: string },
  ): ChildProcess;
}
