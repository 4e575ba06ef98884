public class DigitSum {
    static int digitSum(int n) {
        int s = 0;
        while (n > 0) {
            s += n % 10;
            n /= 10;
        }
        return s;
    }

    public static int main(String[] args) {
        int[] values = {38, 123, 9};
        int count = 0;
        int largest = -1;
        for (int v : values) {
            int d = digitSum(v);
            if (d % 2 == 0) {
                count++;
            }
            largest = Math.max(largest, d);
        }
        return count;
    }
}
